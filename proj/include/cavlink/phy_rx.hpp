#pragma once

#include <optional>
#include <vector>

#include "cavlink/channel.hpp"
#include "cavlink/framing.hpp"
#include "cavlink/phy_common.hpp"
#include "cavlink/phy_tx.hpp"

namespace cavlink {

struct RxConfig {
    double detection_threshold = 0.6;
    int detection_sustain = 96;   // samples the metric must stay above threshold
    int timing_backoff = 4;       // samples backed into the cyclic prefix
};

struct SyncResult {
    size_t start_index = 0;       // refined L-STF start
    double coarse_cfo_hz = 0.0;
    double fine_cfo_hz = 0.0;
    double timing_metric_peak = 0.0;
};

struct ChannelEstimate {
    std::vector<Complex> gains;   // 52 occupied subcarriers, ascending logical index
    double noise_variance = 0.0;  // per-sample linear power
};

struct LsigInfo {
    int mcs_index = 0;
    size_t psdu_length = 0;
};

enum class PacketStatus { Ok, HeaderFail, FcsFail };

/// Everything the receiver learns about one detected packet.
struct PacketResult {
    SyncResult sync;
    ChannelEstimate chan;
    std::optional<LsigInfo> lsig;                  // empty on HeaderFail
    std::vector<std::vector<Complex>> csi_per_symbol;  // n_symbols x 52
    std::vector<Complex> equalized_symbols;        // 48 * n_symbols
    std::vector<Complex> reference_symbols;        // re-encoded reference points
    double evm_rms_percent = 0.0;
    double evm_peak_percent = 0.0;
    ByteVector psdu;
    std::optional<Mpdu> mpdu;
    PacketStatus status = PacketStatus::HeaderFail;
    double residual_cfo_hz = 0.0;  // pilot-tracked, on top of coarse + fine
    double total_cfo_hz = 0.0;     // coarse + fine + residual
    uint8_t scrambler_seed = 0;
    size_t lltf_start = 0;         // absolute index of the refined L-LTF start
};

/// Delay-16 autocorrelation detector with cross-correlation position
/// refinement; one candidate start index per detected packet, ascending.
std::vector<size_t> detect_packets(const IqWaveform& waveform, double threshold = 0.6,
                                   int sustain = 96);

/// CFO from the lag-16 autocorrelation of the short training field.
/// region must hold at least 160 samples starting at the L-STF.
double coarse_cfo(const std::vector<Complex>& lstf_region, double sample_rate = kSampleRate);

/// CFO from the lag-64 autocorrelation of the (already coarse-corrected)
/// 160-sample long training field.
double fine_cfo(const std::vector<Complex>& lltf_region, double sample_rate = kSampleRate);

/// Least-squares channel estimate from the two long training symbols
/// (windows at samples 32 and 96 of the 160-sample region).
ChannelEstimate estimate_channel(const std::vector<Complex>& lltf_region);

/// Decode the SIGNAL field from one 80-sample OFDM symbol. nullopt on
/// parity failure, invalid RATE, or out-of-range LENGTH.
std::optional<LsigInfo> decode_lsig(const std::vector<Complex>& symbol, const ChannelEstimate& est);

/// Full receive chain over a burst; one PacketResult per detection.
std::vector<PacketResult> receive_burst(const IqWaveform& waveform, const RxConfig& config = {});

}  // namespace cavlink
