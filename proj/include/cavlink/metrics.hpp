#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavlink/phy_rx.hpp"

namespace cavlink {

/// RMS and peak error vector magnitude in percent, normalized by the average
/// reference power. (rms, peak).
std::pair<double, double> evm(const std::vector<Complex>& received, const std::vector<Complex>& reference);

struct EvmReport {
    std::string scenario;
    int mcs_index = 0;
    double rms_percent = 0.0;
    double peak_percent = 0.0;
    size_t n_symbols = 0;
    bool data_aided = true;
};

/// Bit error ratio; nullopt (not applicable) when the header failed and the
/// packet was discarded.
std::optional<double> ber(const BitVector& tx_bits, const BitVector& rx_bits, bool header_ok);

struct CfoSummary {
    double mean_hz = 0.0;
    double std_hz = 0.0;
    size_t count = 0;
};

/// Per-MCS mean/stddev of the per-packet coarse CFO estimates.
std::map<int, CfoSummary> cfo_summary(const std::vector<PacketResult>& results);

/// Per-symbol-per-subcarrier CSI magnitudes of the first decoded packet,
/// truncated to max_symbols rows. Empty when nothing decoded.
std::vector<std::vector<Complex>> csi_matrix(const std::vector<PacketResult>& results, size_t max_symbols = 12);

/// max/min occupied-subcarrier magnitude in dB for one CSI row set.
double csi_spread_db(const std::vector<std::vector<Complex>>& csi);

std::string evm_csv(const std::vector<EvmReport>& reports);
std::string csi_csv(const std::vector<std::vector<Complex>>& csi);
std::string cfo_csv(const std::map<int, CfoSummary>& summary);

}  // namespace cavlink
