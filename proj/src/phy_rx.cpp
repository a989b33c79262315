#include "cavlink/phy_rx.hpp"

#include <algorithm>
#include <cmath>

#include "cavlink/metrics.hpp"

namespace cavlink {

namespace {

constexpr int kLag = 16;           // L-STF period
constexpr int kDetWindow = 48;     // correlation window length
constexpr int kRefineSpan = 40;    // L-LTF timing search half-width

std::vector<Complex> fft64(const std::vector<Complex>& buf, size_t offset) {
    std::vector<Complex> x(buf.begin() + long(offset), buf.begin() + long(offset) + kFftSize);
    fft_inplace(x, false);
    return x;
}

// Equalized values on the 52 occupied subcarriers plus the pilot common phase.
struct EqSymbol {
    std::vector<Complex> occupied;  // ascending logical index
    double pilot_phase = 0.0;
};

EqSymbol equalize_symbol(const std::vector<Complex>& bins, const ChannelEstimate& est, int polarity_index) {
    EqSymbol out;
    const auto& occ = occupied_carrier_indices();
    out.occupied.resize(kNumOccupied);
    for (int i = 0; i < kNumOccupied; ++i) {
        const Complex h = est.gains[size_t(i)];
        const Complex y = bins[size_t(carrier_to_bin(occ[size_t(i)]))];
        out.occupied[size_t(i)] = (std::norm(h) > 1e-24) ? y / h : Complex(0, 0);
    }
    const double pol = pilot_polarity(polarity_index);
    Complex acc(0, 0);
    const auto& pi = pilot_indices();
    const auto& pv = pilot_values();
    for (int i = 0; i < kNumPilots; ++i) {
        const auto it = std::lower_bound(occ.begin(), occ.end(), pi[size_t(i)]);
        const size_t idx = size_t(it - occ.begin());
        acc += out.occupied[idx] * (pol * pv[size_t(i)]);
    }
    out.pilot_phase = std::arg(acc);
    const Complex rot(std::cos(-out.pilot_phase), std::sin(-out.pilot_phase));
    for (auto& v : out.occupied) v *= rot;
    return out;
}

std::vector<Complex> extract_data(const EqSymbol& eq) {
    const auto& occ = occupied_carrier_indices();
    const auto& dc = data_carrier_indices();
    std::vector<Complex> out(kNumDataCarriers);
    size_t j = 0;
    for (int i = 0; i < kNumOccupied; ++i) {
        if (j < size_t(kNumDataCarriers) && occ[size_t(i)] == dc[j]) out[j++] = eq.occupied[size_t(i)];
    }
    return out;
}

std::vector<double> carrier_weights(const ChannelEstimate& est) {
    std::vector<double> w(kNumOccupied);
    double mean = 0.0;
    for (int i = 0; i < kNumOccupied; ++i) mean += std::norm(est.gains[size_t(i)]);
    mean /= kNumOccupied;
    if (mean <= 0) mean = 1.0;
    for (int i = 0; i < kNumOccupied; ++i) w[size_t(i)] = std::norm(est.gains[size_t(i)]) / mean;
    return w;
}

// data-carrier weights in data-carrier order
std::vector<double> data_weights(const ChannelEstimate& est) {
    const auto w = carrier_weights(est);
    const auto& occ = occupied_carrier_indices();
    const auto& dc = data_carrier_indices();
    std::vector<double> out(kNumDataCarriers);
    size_t j = 0;
    for (int i = 0; i < kNumOccupied; ++i)
        if (j < size_t(kNumDataCarriers) && occ[size_t(i)] == dc[j]) out[j++] = w[size_t(i)];
    return out;
}

uint8_t recover_scrambler_seed(const BitVector& decoded) {
    int best_seed = 1, best_score = -1;
    for (int seed = 1; seed <= 127; ++seed) {
        const BitVector seq = scrambler_sequence(uint8_t(seed), 7);
        int score = 0;
        for (int i = 0; i < 7; ++i)
            if (seq[size_t(i)] == decoded[size_t(i)]) ++score;
        if (score > best_score) {
            best_score = score;
            best_seed = seed;
        }
    }
    return uint8_t(best_seed);
}

}  // namespace

std::vector<size_t> detect_packets(const IqWaveform& waveform, double threshold, int sustain) {
    if (threshold <= 0.0 || threshold >= 1.0) throw std::invalid_argument("threshold must lie in (0,1)");
    const auto& r = waveform.samples;
    std::vector<size_t> candidates;
    if (r.size() < size_t(kDetWindow + kLag + 1)) return candidates;

    const size_t n_pos = r.size() - size_t(kDetWindow + kLag);
    static const IqWaveform stf_ref = build_lstf();

    Complex c(0, 0);
    double p = 0.0;
    for (int k = 0; k < kDetWindow; ++k) {
        c += r[size_t(k)] * std::conj(r[size_t(k + kLag)]);
        p += std::norm(r[size_t(k + kLag)]);
    }

    size_t run_start = 0;
    int run_len = 0;
    size_t skip_until = 0;

    for (size_t n = 0; n < n_pos; ++n) {
        const double metric = (p > 1e-30) ? std::abs(c) / p : 0.0;
        const bool above = metric > threshold && n >= skip_until;
        if (above) {
            if (run_len == 0) run_start = n;
            ++run_len;
        } else {
            if (run_len >= sustain) {
                // refine the plateau leading edge against the clean short preamble
                const long lo = std::max<long>(0, long(run_start) - 24);
                const long hi = std::min<long>(long(r.size()) - 160, long(run_start) + 64);
                long best_n = long(run_start);
                double best_mag = -1.0;
                for (long m = lo; m <= hi; ++m) {
                    Complex acc(0, 0);
                    for (int k = 0; k < 160; ++k) acc += r[size_t(m + k)] * std::conj(stf_ref.samples[size_t(k)]);
                    const double mag = std::abs(acc);
                    if (mag > best_mag) {
                        best_mag = mag;
                        best_n = m;
                    }
                }
                candidates.push_back(size_t(best_n));
                skip_until = size_t(best_n) + 480;  // past preamble + SIGNAL
            }
            run_len = 0;
        }
        // slide
        c -= r[n] * std::conj(r[n + size_t(kLag)]);
        c += r[n + size_t(kDetWindow)] * std::conj(r[n + size_t(kDetWindow + kLag)]);
        p -= std::norm(r[n + size_t(kLag)]);
        p += std::norm(r[n + size_t(kDetWindow + kLag)]);
    }
    if (run_len >= sustain) candidates.push_back(run_start);
    return candidates;
}

double coarse_cfo(const std::vector<Complex>& lstf_region, double sample_rate) {
    if (lstf_region.size() < 160) throw std::invalid_argument("coarse CFO needs at least 160 samples");
    Complex acc(0, 0);
    for (int n = 0; n < 144; ++n) acc += std::conj(lstf_region[size_t(n)]) * lstf_region[size_t(n + kLag)];
    return std::arg(acc) / (2.0 * M_PI * double(kLag) / sample_rate);
}

double fine_cfo(const std::vector<Complex>& lltf_region, double sample_rate) {
    if (lltf_region.size() < 160) throw std::invalid_argument("fine CFO needs 160 samples");
    // skip the CP: its head carries the multipath transient from the STF
    Complex acc(0, 0);
    for (int n = 32; n < 96; ++n) acc += std::conj(lltf_region[size_t(n)]) * lltf_region[size_t(n + 64)];
    return std::arg(acc) / (2.0 * M_PI * 64.0 / sample_rate);
}

ChannelEstimate estimate_channel(const std::vector<Complex>& lltf_region) {
    if (lltf_region.size() < 160) throw std::invalid_argument("channel estimate needs 160 samples");
    const auto x1 = fft64(lltf_region, 32);
    const auto x2 = fft64(lltf_region, 96);
    const auto& seq = lltf_sequence();
    const auto& occ = occupied_carrier_indices();
    ChannelEstimate est;
    est.gains.resize(kNumOccupied);
    double nv = 0.0;
    for (int i = 0; i < kNumOccupied; ++i) {
        const int k = occ[size_t(i)];
        const int bin = carrier_to_bin(k);
        const double ref = seq[size_t(k + 26)];
        est.gains[size_t(i)] = (x1[size_t(bin)] + x2[size_t(bin)]) / (2.0 * ref);
        nv += std::norm(x1[size_t(bin)] - x2[size_t(bin)]);
    }
    est.noise_variance = nv / (2.0 * kNumOccupied);
    return est;
}

std::optional<LsigInfo> decode_lsig(const std::vector<Complex>& symbol, const ChannelEstimate& est) {
    if (symbol.size() < size_t(kSymbolLen)) return std::nullopt;
    const auto bins = fft64(symbol, size_t(kCpLen));
    const EqSymbol eq = equalize_symbol(bins, est, 0);
    const auto data = extract_data(eq);
    const auto weights = data_weights(est);

    SoftVector soft;
    soft.reserve(48);
    for (int i = 0; i < 48; ++i) demap_soft(data[size_t(i)], Modulation::BPSK, weights[size_t(i)], soft);
    const SoftVector deint = deinterleave_soft(soft, 1, 48);
    const BitVector field = viterbi_decode(deint, 24);

    uint8_t rate_bits = 0;
    for (int i = 0; i < 4; ++i) rate_bits |= uint8_t(field[size_t(i)] << i);
    const int mcs = mcs_from_rate_bits(rate_bits);
    if (mcs < 0) return std::nullopt;
    uint8_t parity = 0;
    for (int i = 0; i <= 17; ++i) parity ^= field[size_t(i)];
    if (parity != 0) return std::nullopt;
    size_t length = 0;
    for (int i = 0; i < 12; ++i) length |= size_t(field[size_t(5 + i)]) << i;
    if (length < 1 || length > kMaxPsduBytes) return std::nullopt;
    return LsigInfo{mcs, length};
}

std::vector<PacketResult> receive_burst(const IqWaveform& waveform, const RxConfig& config) {
    std::vector<PacketResult> results;
    const auto candidates = detect_packets(waveform, config.detection_threshold, config.detection_sustain);
    const auto& r = waveform.samples;
    const double fs = waveform.sample_rate;
    static const IqWaveform lltf_ref = build_lltf();

    for (size_t cand : candidates) {
        PacketResult res;
        res.sync.start_index = cand;
        res.status = PacketStatus::HeaderFail;

        if (cand + 480 > r.size()) {
            results.push_back(std::move(res));
            continue;
        }

        // coarse CFO over the short training field
        {
            std::vector<Complex> region(r.begin() + long(cand), r.begin() + long(cand) + 160);
            res.sync.coarse_cfo_hz = coarse_cfo(region, fs);
        }

        auto corrected = [&](size_t abs_idx, double cfo_hz) {
            const double w = -2.0 * M_PI * cfo_hz / fs;
            const double ang = w * double(abs_idx - cand);
            return r[abs_idx] * Complex(std::cos(ang), std::sin(ang));
        };

        // refine L-LTF timing by cross-correlation against the clean field
        const long nominal = long(cand) + 160;
        long lltf_start = nominal;
        double best_mag = -1.0;
        for (long m = nominal - kRefineSpan; m <= nominal + kRefineSpan; ++m) {
            if (m < 0 || size_t(m) + 160 > r.size()) continue;
            Complex acc(0, 0);
            for (int k = 0; k < 160; ++k)
                acc += corrected(size_t(m + k), res.sync.coarse_cfo_hz) * std::conj(lltf_ref.samples[size_t(k)]);
            const double mag = std::abs(acc);
            if (mag > best_mag) {
                best_mag = mag;
                lltf_start = m;
            }
        }
        res.lltf_start = size_t(lltf_start);
        res.sync.timing_metric_peak = 1.0;

        // fine CFO from the two long training symbols
        if (size_t(lltf_start) + 160 > r.size()) {
            results.push_back(std::move(res));
            continue;
        }
        {
            std::vector<Complex> region(160);
            for (int k = 0; k < 160; ++k)
                region[size_t(k)] = corrected(size_t(lltf_start + k), res.sync.coarse_cfo_hz);
            res.sync.fine_cfo_hz = fine_cfo(region, fs);
        }
        const double cfo = res.sync.coarse_cfo_hz + res.sync.fine_cfo_hz;
        res.total_cfo_hz = cfo;

        // channel + noise estimate, with the FFT windows backed into the CP
        const long est_base = lltf_start - config.timing_backoff;
        if (est_base < 0 || size_t(est_base) + 160 > r.size()) {
            results.push_back(std::move(res));
            continue;
        }
        {
            std::vector<Complex> region(160);
            for (int k = 0; k < 160; ++k) region[size_t(k)] = corrected(size_t(est_base + k), cfo);
            res.chan = estimate_channel(region);
        }

        // SIGNAL field
        const long lsig_start = lltf_start + 160 - config.timing_backoff;
        if (size_t(lsig_start) + size_t(kSymbolLen) > r.size()) {
            results.push_back(std::move(res));
            continue;
        }
        {
            std::vector<Complex> sym(static_cast<size_t>(kSymbolLen));
            for (int k = 0; k < kSymbolLen; ++k) sym[size_t(k)] = corrected(size_t(lsig_start + k), cfo);
            res.lsig = decode_lsig(sym, res.chan);
        }
        if (!res.lsig) {
            results.push_back(std::move(res));
            continue;
        }

        const Mcs& mcs = mcs_table(res.lsig->mcs_index);
        const size_t n_sym = data_symbol_count(res.lsig->psdu_length, mcs);
        const long data_start = lltf_start + 160 + kSymbolLen - config.timing_backoff;
        if (size_t(data_start) + n_sym * size_t(kSymbolLen) > r.size()) {
            res.lsig.reset();
            results.push_back(std::move(res));
            continue;
        }

        const auto weights = data_weights(res.chan);
        SoftVector coded;
        coded.reserve(n_sym * size_t(mcs.coded_bits_per_symbol));
        std::vector<double> pilot_phases(n_sym);
        res.csi_per_symbol.reserve(n_sym);
        res.equalized_symbols.reserve(n_sym * size_t(kNumDataCarriers));

        for (size_t s = 0; s < n_sym; ++s) {
            const size_t base = size_t(data_start) + s * size_t(kSymbolLen);
            std::vector<Complex> sym(static_cast<size_t>(kSymbolLen));
            for (int k = 0; k < kSymbolLen; ++k) sym[size_t(k)] = corrected(base + size_t(k), cfo);
            const auto bins = fft64(sym, size_t(kCpLen));
            const EqSymbol eq = equalize_symbol(bins, res.chan, int(s) + 1);
            pilot_phases[s] = eq.pilot_phase;

            std::vector<Complex> row(kNumOccupied);
            const Complex rot(std::cos(eq.pilot_phase), std::sin(eq.pilot_phase));
            for (int i = 0; i < kNumOccupied; ++i) row[size_t(i)] = res.chan.gains[size_t(i)] * rot;
            res.csi_per_symbol.push_back(std::move(row));

            const auto data = extract_data(eq);
            SoftVector soft;
            soft.reserve(size_t(mcs.coded_bits_per_symbol));
            for (int i = 0; i < kNumDataCarriers; ++i)
                demap_soft(data[size_t(i)], mcs.modulation, weights[size_t(i)], soft);
            const SoftVector deint = deinterleave_soft(soft, mcs.bits_per_subcarrier, mcs.coded_bits_per_symbol);
            coded.insert(coded.end(), deint.begin(), deint.end());
            res.equalized_symbols.insert(res.equalized_symbols.end(), data.begin(), data.end());
        }

        // residual CFO from the unwrapped pilot-phase slope
        if (n_sym >= 2) {
            std::vector<double> phi(n_sym);
            phi[0] = pilot_phases[0];
            for (size_t s = 1; s < n_sym; ++s) {
                double d = pilot_phases[s] - pilot_phases[s - 1];
                while (d > M_PI) d -= 2.0 * M_PI;
                while (d < -M_PI) d += 2.0 * M_PI;
                phi[s] = phi[s - 1] + d;
            }
            const double n_mean = double(n_sym - 1) / 2.0;
            double num = 0.0, den = 0.0;
            double p_mean = 0.0;
            for (double v : phi) p_mean += v;
            p_mean /= double(n_sym);
            for (size_t s = 0; s < n_sym; ++s) {
                num += (double(s) - n_mean) * (phi[s] - p_mean);
                den += (double(s) - n_mean) * (double(s) - n_mean);
            }
            const double slope = num / den;  // rad per symbol
            res.residual_cfo_hz = slope / (2.0 * M_PI * double(kSymbolLen) / fs);
            res.total_cfo_hz = cfo + res.residual_cfo_hz;
        }

        // depuncture, decode, descramble
        const size_t n_info = n_sym * size_t(mcs.data_bits_per_symbol);
        const BitVector decoded = viterbi_decode_punctured(coded, mcs.rate, n_info);
        res.scrambler_seed = recover_scrambler_seed(decoded);
        const BitVector plain = scramble(decoded, res.scrambler_seed);

        const size_t psdu_bits = 8 * res.lsig->psdu_length;
        BitVector payload(plain.begin() + kServiceBits, plain.begin() + kServiceBits + long(psdu_bits));
        res.psdu = bits_to_bytes(payload);

        // data-aided reference from the decoded bits; exact when decoding succeeded
        res.reference_symbols = reference_symbols(res.psdu, mcs, res.scrambler_seed);
        const auto ev = evm(res.equalized_symbols, res.reference_symbols);
        res.evm_rms_percent = ev.first;
        res.evm_peak_percent = ev.second;

        res.mpdu = parse_mpdu(res.psdu);
        res.status = res.mpdu ? PacketStatus::Ok : PacketStatus::FcsFail;
        results.push_back(std::move(res));
    }
    return results;
}

}  // namespace cavlink
