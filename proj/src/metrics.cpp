#include "cavlink/metrics.hpp"

#include <cmath>
#include <sstream>

namespace cavlink {

std::pair<double, double> evm(const std::vector<Complex>& received, const std::vector<Complex>& reference) {
    if (received.empty()) throw std::invalid_argument("EVM needs at least one symbol");
    if (received.size() != reference.size()) throw std::invalid_argument("EVM length mismatch");
    double err = 0.0, ref = 0.0, peak = 0.0;
    for (size_t i = 0; i < received.size(); ++i) {
        const double e = std::norm(received[i] - reference[i]);
        err += e;
        ref += std::norm(reference[i]);
        peak = std::max(peak, e);
    }
    if (ref <= 0.0) throw std::invalid_argument("reference power is zero");
    const double mean_ref = ref / double(received.size());
    return {100.0 * std::sqrt(err / ref), 100.0 * std::sqrt(peak / mean_ref)};
}

std::optional<double> ber(const BitVector& tx_bits, const BitVector& rx_bits, bool header_ok) {
    if (!header_ok) return std::nullopt;  // packet discarded on a corrupt header
    if (tx_bits.size() != rx_bits.size()) throw std::invalid_argument("BER length mismatch");
    if (tx_bits.empty()) return 0.0;
    size_t errors = 0;
    for (size_t i = 0; i < tx_bits.size(); ++i)
        if (tx_bits[i] != rx_bits[i]) ++errors;
    return double(errors) / double(tx_bits.size());
}

std::map<int, CfoSummary> cfo_summary(const std::vector<PacketResult>& results) {
    std::map<int, std::vector<double>> per_mcs;
    for (const auto& r : results)
        if (r.lsig) per_mcs[r.lsig->mcs_index].push_back(r.sync.coarse_cfo_hz);
    std::map<int, CfoSummary> out;
    for (const auto& [mcs, vals] : per_mcs) {
        CfoSummary s;
        s.count = vals.size();
        for (double v : vals) s.mean_hz += v;
        s.mean_hz /= double(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - s.mean_hz) * (v - s.mean_hz);
        s.std_hz = vals.size() > 1 ? std::sqrt(var / double(vals.size() - 1)) : 0.0;
        out[mcs] = s;
    }
    return out;
}

std::vector<std::vector<Complex>> csi_matrix(const std::vector<PacketResult>& results, size_t max_symbols) {
    for (const auto& r : results) {
        if (!r.lsig || r.csi_per_symbol.empty()) continue;
        const size_t rows = std::min(max_symbols, r.csi_per_symbol.size());
        return {r.csi_per_symbol.begin(), r.csi_per_symbol.begin() + long(rows)};
    }
    return {};
}

double csi_spread_db(const std::vector<std::vector<Complex>>& csi) {
    double lo = 1e300, hi = 0.0;
    for (const auto& row : csi)
        for (const auto& v : row) {
            const double m = std::abs(v);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    if (hi <= 0.0 || lo <= 0.0 || lo > hi) return 0.0;
    return 20.0 * std::log10(hi / lo);
}

std::string evm_csv(const std::vector<EvmReport>& reports) {
    std::ostringstream os;
    os << "scenario,mcs,rms_percent,peak_percent\n";
    os.precision(6);
    for (const auto& r : reports)
        os << r.scenario << ',' << r.mcs_index << ',' << r.rms_percent << ',' << r.peak_percent << '\n';
    return os.str();
}

std::string csi_csv(const std::vector<std::vector<Complex>>& csi) {
    std::ostringstream os;
    os << "symbol,subcarrier,magnitude_db,phase_rad\n";
    os.precision(6);
    const auto& occ = occupied_carrier_indices();
    for (size_t s = 0; s < csi.size(); ++s)
        for (size_t i = 0; i < csi[s].size(); ++i) {
            const double mag = std::abs(csi[s][i]);
            os << s << ',' << occ[i] << ',' << (mag > 0 ? 20.0 * std::log10(mag) : -300.0) << ','
               << std::arg(csi[s][i]) << '\n';
        }
    return os.str();
}

std::string cfo_csv(const std::map<int, CfoSummary>& summary) {
    std::ostringstream os;
    os << "mcs,mean_hz,std_hz\n";
    os.precision(6);
    for (const auto& [mcs, s] : summary) os << mcs << ',' << s.mean_hz << ',' << s.std_hz << '\n';
    return os.str();
}

}  // namespace cavlink
