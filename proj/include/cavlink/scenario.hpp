#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavlink/channel.hpp"
#include "cavlink/metrics.hpp"
#include "cavlink/phy_rx.hpp"

namespace cavlink {

/// Full experiment description. Defaults follow the measurement
/// configuration: 2304-byte MSDUs, 20 MHz bandwidth at 2.432 GHz,
/// 20 us packet idle time, MCS 0-7.
struct ScenarioConfig {
    std::vector<int> mcs_list = {0, 1, 2, 3, 4, 5, 6, 7};
    size_t msdu_length = 2304;
    double bandwidth_hz = 20e6;
    double center_frequency_hz = 2.432e9;
    double idle_time_s = 20e-6;
    std::string preset_name = "CornerLoaded";
    double preset_tau_s = 0.0;      // >0 overrides the preset default
    double preset_k_factor = -1.0;  // >=0 overrides the preset default
    double snr_db = std::numeric_limits<double>::infinity();
    double cfo_hz = 0.0;
    size_t timing_offset = 0;
    std::string distance_label = "25mm";  // 25mm or 125mm
    std::vector<uint64_t> seeds = {1};
    std::string image_path;  // empty: bundled test pattern
    std::string output_dir = "out";
    double detection_threshold = 0.6;
    uint8_t scrambler_seed = 0b1011101;
    int repeat_count = 1;

    LoadingPreset resolve_preset() const;
};

ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& config);

struct PacketReport {
    std::string status;  // Ok / HeaderFail / FcsFail
    int mcs_index = -1;
    double evm_rms_percent = 0.0;
    double evm_peak_percent = 0.0;
    bool data_aided = false;
    double coarse_cfo_hz = 0.0;
    double fine_cfo_hz = 0.0;
    double residual_cfo_hz = 0.0;
    bool ber_applicable = false;
    double ber_value = 0.0;
    size_t n_symbols = 0;
};

struct RunReport {
    int mcs_index = 0;
    uint64_t seed = 0;
    double coherence_bandwidth_hz = 0.0;  // ground truth from the drawn realization
    size_t packets_sent = 0;
    size_t packets_detected = 0;
    size_t header_fail_count = 0;
    size_t fcs_fail_count = 0;
    std::string image_integrity;  // Exact / CrcMismatch / Truncated / Missing
    size_t image_byte_errors = 0;
    double csi_spread_db = 0.0;
    std::vector<PacketReport> packets;
};

struct LinkReport {
    ScenarioConfig config;
    std::vector<RunReport> runs;
    std::vector<EvmReport> evm_reports;
    std::map<int, CfoSummary> cfo_by_mcs;
    std::vector<std::vector<Complex>> csi;  // first decoded packet, <=12 symbols
};

/// Encode the image, frame it, run TX -> channel -> RX for every
/// (mcs, seed) pair and aggregate the observables.
LinkReport run_scenario(const ScenarioConfig& config);

/// Write evm.csv, csi.csv, cfo.csv, summary.json and recovered images
/// under config.output_dir.
void write_report_files(const LinkReport& report, const std::string& output_dir);

std::string summary_json(const LinkReport& report);

/// Offline analysis of a recorded burst: phy_rx + metrics only,
/// decision-directed EVM, no channel model involved.
LinkReport analyze_capture(const IqWaveform& capture, const ScenarioConfig& config);

/// Interleaved 32-bit little-endian float I/Q with a JSON sidecar at
/// path + ".json".
void write_iq(const IqWaveform& waveform, const std::string& path,
              double center_frequency_hz = 2.432e9);
IqWaveform read_iq(const std::string& path);

}  // namespace cavlink
