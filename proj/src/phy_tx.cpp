#include "cavlink/phy_tx.hpp"

#include <cmath>

namespace cavlink {

namespace {

void check_rate(double sample_rate) {
    if (sample_rate != kSampleRate) throw std::invalid_argument("only 20 Msps is supported");
}

// One OFDM symbol (CP + 64 samples) from frequency-domain values on logical
// subcarriers; freq[k] indexed by logical subcarrier via carrier_to_bin.
std::vector<Complex> ofdm_symbol(const std::vector<Complex>& bins) {
    std::vector<Complex> t = fft(bins, /*inverse=*/true);
    std::vector<Complex> out;
    out.reserve(kSymbolLen);
    out.insert(out.end(), t.end() - kCpLen, t.end());
    out.insert(out.end(), t.begin(), t.end());
    return out;
}

std::vector<Complex> lstf_symbol() {
    const double a = std::sqrt(13.0 / 6.0);
    std::vector<Complex> bins(kFftSize, Complex(0, 0));
    struct KV { int k; double re; };
    static const KV kv[] = {{-24, 1},  {-20, -1}, {-16, 1}, {-12, -1}, {-8, -1}, {-4, 1},
                            {4, -1},   {8, -1},   {12, 1},  {16, 1},   {20, 1},  {24, 1}};
    for (const auto& e : kv) bins[size_t(carrier_to_bin(e.k))] = Complex(e.re * a, e.re * a);
    return fft(bins, true);
}

std::vector<Complex> lltf_symbol() {
    std::vector<Complex> bins(kFftSize, Complex(0, 0));
    const auto& seq = lltf_sequence();
    for (int k = -26; k <= 26; ++k) bins[size_t(carrier_to_bin(k))] = Complex(seq[size_t(k + 26)], 0.0);
    return fft(bins, true);
}

// Map 48 data points + 4 pilots into one OFDM symbol.
std::vector<Complex> data_ofdm_symbol(const std::vector<Complex>& points, size_t offset, int polarity_index) {
    std::vector<Complex> bins(kFftSize, Complex(0, 0));
    const auto& dc = data_carrier_indices();
    for (int i = 0; i < kNumDataCarriers; ++i)
        bins[size_t(carrier_to_bin(dc[size_t(i)]))] = points[offset + size_t(i)];
    const double pol = pilot_polarity(polarity_index);
    const auto& pi = pilot_indices();
    const auto& pv = pilot_values();
    for (int i = 0; i < kNumPilots; ++i)
        bins[size_t(carrier_to_bin(pi[size_t(i)]))] = Complex(pv[size_t(i)] * pol, 0.0);
    return ofdm_symbol(bins);
}

}  // namespace

IqWaveform build_lstf(double sample_rate) {
    check_rate(sample_rate);
    const auto sym = lstf_symbol();
    IqWaveform w;
    w.sample_rate = sample_rate;
    w.samples.reserve(160);
    for (int n = 0; n < 160; ++n) w.samples.push_back(sym[size_t(n % kFftSize)]);
    return w;
}

IqWaveform build_lltf(double sample_rate) {
    check_rate(sample_rate);
    const auto sym = lltf_symbol();
    IqWaveform w;
    w.sample_rate = sample_rate;
    w.samples.reserve(160);
    w.samples.insert(w.samples.end(), sym.begin() + 32, sym.end());
    w.samples.insert(w.samples.end(), sym.begin(), sym.end());
    w.samples.insert(w.samples.end(), sym.begin(), sym.end());
    return w;
}

BitVector build_lsig_bits(const Mcs& mcs, size_t psdu_length) {
    if (psdu_length < 1 || psdu_length > kMaxPsduBytes) throw std::invalid_argument("PSDU length out of range");
    BitVector bits(24, 0);
    for (int i = 0; i < 4; ++i) bits[size_t(i)] = uint8_t((mcs.rate_bits >> i) & 1);
    // bit 4 reserved = 0; bits 5..16 LENGTH, LSB first
    for (int i = 0; i < 12; ++i) bits[size_t(5 + i)] = uint8_t((psdu_length >> i) & 1);
    uint8_t parity = 0;
    for (int i = 0; i <= 16; ++i) parity ^= bits[size_t(i)];
    bits[17] = parity;
    // bits 18..23 tail zeros
    return bits;
}

IqWaveform build_lsig(const Mcs& mcs, size_t psdu_length) {
    const BitVector field = build_lsig_bits(mcs, psdu_length);
    const BitVector coded = conv_encode(field);  // rate 1/2, 48 bits
    const BitVector inter = interleave(coded, 1, 48);
    std::vector<Complex> points(48);
    for (int i = 0; i < 48; ++i) points[size_t(i)] = map_symbol(inter, size_t(i), Modulation::BPSK);
    IqWaveform w;
    w.sample_rate = kSampleRate;
    w.samples = data_ofdm_symbol(points, 0, 0);  // L-SIG uses polarity element 0
    return w;
}

size_t data_symbol_count(size_t psdu_length, const Mcs& mcs) {
    const size_t n_bits = kServiceBits + 8 * psdu_length + kTailBits;
    return (n_bits + size_t(mcs.data_bits_per_symbol) - 1) / size_t(mcs.data_bits_per_symbol);
}

DataField modulate_data(const Psdu& psdu, const Mcs& mcs, uint8_t scrambler_seed) {
    if (psdu.empty() || psdu.size() > kMaxPsduBytes) throw std::invalid_argument("PSDU length out of range");
    const size_t n_sym = data_symbol_count(psdu.size(), mcs);
    const size_t n_info = n_sym * size_t(mcs.data_bits_per_symbol);

    BitVector bits(n_info, 0);
    const BitVector payload_bits = bytes_to_bits(psdu);
    std::copy(payload_bits.begin(), payload_bits.end(), bits.begin() + kServiceBits);

    BitVector scrambled = scramble(bits, scrambler_seed);
    const size_t tail_at = kServiceBits + payload_bits.size();
    for (size_t i = 0; i < kTailBits; ++i) scrambled[tail_at + i] = 0;  // tail not scrambled

    const BitVector coded = puncture(conv_encode(scrambled), mcs.rate);

    DataField out;
    out.n_symbols = n_sym;
    out.waveform.sample_rate = kSampleRate;
    out.waveform.samples.reserve(n_sym * size_t(kSymbolLen));
    out.symbols.reserve(n_sym * size_t(kNumDataCarriers));

    const int ncbps = mcs.coded_bits_per_symbol;
    for (size_t s = 0; s < n_sym; ++s) {
        BitVector block(coded.begin() + long(s * size_t(ncbps)), coded.begin() + long((s + 1) * size_t(ncbps)));
        const BitVector inter = interleave(block, mcs.bits_per_subcarrier, ncbps);
        std::vector<Complex> points(kNumDataCarriers);
        for (int i = 0; i < kNumDataCarriers; ++i)
            points[size_t(i)] = map_symbol(inter, size_t(i * mcs.bits_per_subcarrier), mcs.modulation);
        const auto sym = data_ofdm_symbol(points, 0, int(s) + 1);
        out.waveform.samples.insert(out.waveform.samples.end(), sym.begin(), sym.end());
        out.symbols.insert(out.symbols.end(), points.begin(), points.end());
    }
    return out;
}

IqWaveform build_ppdu(const NonHtPacket& packet, uint8_t scrambler_seed) {
    const Mcs& mcs = mcs_table(packet.mcs_index);
    IqWaveform w = build_lstf();
    const IqWaveform lltf = build_lltf();
    const IqWaveform lsig = build_lsig(mcs, packet.psdu.size());
    const DataField data = modulate_data(packet.psdu, mcs, scrambler_seed);
    w.samples.insert(w.samples.end(), lltf.samples.begin(), lltf.samples.end());
    w.samples.insert(w.samples.end(), lsig.samples.begin(), lsig.samples.end());
    w.samples.insert(w.samples.end(), data.waveform.samples.begin(), data.waveform.samples.end());
    return w;
}

IqWaveform assemble_burst(const std::vector<IqWaveform>& ppdus, double idle_time) {
    IqWaveform w;
    w.sample_rate = kSampleRate;
    if (ppdus.empty()) return w;
    for (const auto& p : ppdus)
        if (p.sample_rate != ppdus.front().sample_rate) throw std::invalid_argument("mixed sample rates in burst");
    w.sample_rate = ppdus.front().sample_rate;
    const size_t gap = size_t(std::llround(idle_time * w.sample_rate));
    for (const auto& p : ppdus) {
        w.samples.insert(w.samples.end(), gap, Complex(0, 0));
        w.samples.insert(w.samples.end(), p.samples.begin(), p.samples.end());
    }
    return w;
}

std::vector<Complex> reference_symbols(const Psdu& psdu, const Mcs& mcs, uint8_t scrambler_seed) {
    return modulate_data(psdu, mcs, scrambler_seed).symbols;
}

}  // namespace cavlink
