#include "cavlink/bits.hpp"

#include <array>
#include <cstring>
#include <limits>

namespace cavlink {

namespace {

constexpr unsigned kGenA = 0b1011011;  // 133 octal
constexpr unsigned kGenB = 0b1111001;  // 171 octal

inline int parity7(unsigned v) { return __builtin_popcount(v & 0x7F) & 1; }

// puncture keep-patterns per period of coded bits
const std::vector<int>& keep_indices(CodeRate rate) {
    static const std::vector<int> half = {0, 1};
    static const std::vector<int> two_thirds = {0, 1, 2};        // drop B1 of A0B0A1B1
    static const std::vector<int> three_quarters = {0, 1, 2, 5};  // drop B1, A2 of A0B0A1B1A2B2
    switch (rate) {
        case CodeRate::Half: return half;
        case CodeRate::TwoThirds: return two_thirds;
        default: return three_quarters;
    }
}

int puncture_period(CodeRate rate) {
    switch (rate) {
        case CodeRate::Half: return 2;
        case CodeRate::TwoThirds: return 4;
        default: return 6;
    }
}

}  // namespace

BitVector scrambler_sequence(uint8_t seed, size_t n) {
    if (seed == 0 || seed > 127) throw std::invalid_argument("scrambler seed must be a nonzero 7-bit value");
    BitVector out(n);
    unsigned s = seed;
    for (size_t i = 0; i < n; ++i) {
        unsigned b = ((s >> 6) ^ (s >> 3)) & 1;
        s = ((s << 1) | b) & 0x7F;
        out[i] = uint8_t(b);
    }
    return out;
}

BitVector scramble(const BitVector& data, uint8_t seed) {
    BitVector seq = scrambler_sequence(seed, data.size());
    BitVector out(data.size());
    for (size_t i = 0; i < data.size(); ++i) out[i] = data[i] ^ seq[i];
    return out;
}

BitVector conv_encode(const BitVector& data) {
    BitVector out;
    out.reserve(data.size() * 2);
    unsigned state = 0;  // previous six inputs, bit5 = most recent
    for (uint8_t b : data) {
        unsigned v = ((b & 1u) << 6) | state;
        out.push_back(uint8_t(parity7(v & kGenA)));
        out.push_back(uint8_t(parity7(v & kGenB)));
        state = ((b & 1u) << 5) | (state >> 1);
    }
    return out;
}

BitVector puncture(const BitVector& coded, CodeRate rate) {
    const int period = puncture_period(rate);
    if (coded.size() % size_t(period) != 0)
        throw std::invalid_argument("coded length not divisible by puncturing period");
    if (rate == CodeRate::Half) return coded;
    const auto& keep = keep_indices(rate);
    BitVector out;
    out.reserve(coded.size() * keep.size() / size_t(period));
    for (size_t base = 0; base < coded.size(); base += size_t(period))
        for (int k : keep) out.push_back(coded[base + size_t(k)]);
    return out;
}

SoftVector depuncture(const SoftVector& punctured, CodeRate rate) {
    const int period = puncture_period(rate);
    const auto& keep = keep_indices(rate);
    if (punctured.size() % keep.size() != 0)
        throw std::invalid_argument("punctured length not divisible by pattern length");
    if (rate == CodeRate::Half) return punctured;
    const size_t blocks = punctured.size() / keep.size();
    SoftVector out(blocks * size_t(period), kErasure);
    size_t p = 0;
    for (size_t blk = 0; blk < blocks; ++blk)
        for (int k : keep) out[blk * size_t(period) + size_t(k)] = punctured[p++];
    return out;
}

size_t punctured_length(size_t n_info, CodeRate rate) {
    const size_t coded = 2 * n_info;
    const int period = puncture_period(rate);
    if (coded % size_t(period) != 0)
        throw std::invalid_argument("info length incompatible with puncturing period");
    return coded / size_t(period) * keep_indices(rate).size();
}

BitVector viterbi_decode(const SoftVector& llrs, size_t n_info) {
    if (llrs.size() != 2 * n_info) throw std::invalid_argument("LLR count must be 2 * n_info");
    constexpr int kStates = 64;

    // per-state output bits, precomputed once
    static const auto outputs = [] {
        std::array<std::array<uint8_t, 2>, 128> t{};
        for (unsigned v = 0; v < 128; ++v) {
            t[v][0] = uint8_t(parity7(v & kGenA));
            t[v][1] = uint8_t(parity7(v & kGenB));
        }
        return t;
    }();

    std::vector<int32_t> metric(kStates, std::numeric_limits<int32_t>::min() / 4);
    std::vector<int32_t> next(kStates);
    metric[0] = 0;
    std::vector<uint64_t> decisions(n_info, 0);

    for (size_t step = 0; step < n_info; ++step) {
        const int la = llrs[2 * step];
        const int lb = llrs[2 * step + 1];
        uint64_t dec = 0;
        for (int ns = 0; ns < kStates; ++ns) {
            const int b = ns >> 5;
            const int base = (ns & 0x1F) << 1;
            int32_t best = std::numeric_limits<int32_t>::min();
            int choice = 0;
            for (int low = 0; low < 2; ++low) {
                const int ps = base | low;
                const unsigned v = unsigned(b << 6) | unsigned(ps);
                int32_t m = metric[ps];
                m += outputs[v][0] ? la : -la;
                m += outputs[v][1] ? lb : -lb;
                if (m > best) {
                    best = m;
                    choice = low;
                }
            }
            next[ns] = best;
            if (choice) dec |= (uint64_t(1) << ns);
        }
        decisions[step] = dec;
        metric.swap(next);
    }

    int state = 0;
    int32_t best = metric[0];
    for (int s = 1; s < kStates; ++s)
        if (metric[s] > best) {
            best = metric[s];
            state = s;
        }

    BitVector out(n_info);
    for (size_t step = n_info; step-- > 0;) {
        out[step] = uint8_t(state >> 5);
        const int low = int((decisions[step] >> state) & 1);
        state = ((state & 0x1F) << 1) | low;
    }
    return out;
}

BitVector viterbi_decode_punctured(const SoftVector& punctured, CodeRate rate, size_t n_info) {
    return viterbi_decode(depuncture(punctured, rate), n_info);
}

std::vector<int> interleaver_map(int nbpsc, int ncbps) {
    const int s = std::max(nbpsc / 2, 1);
    std::vector<int> map(static_cast<size_t>(ncbps), 0);
    for (int k = 0; k < ncbps; ++k) {
        const int i = (ncbps / 16) * (k % 16) + k / 16;
        const int j = s * (i / s) + (i + ncbps - (16 * i / ncbps)) % s;
        map[size_t(k)] = j;
    }
    return map;
}

namespace {
template <typename T>
std::vector<T> permute(const std::vector<T>& in, int nbpsc, int ncbps, bool forward) {
    if (int(in.size()) != ncbps) throw std::invalid_argument("interleaver block length mismatch");
    const auto map = interleaver_map(nbpsc, ncbps);
    std::vector<T> out(in.size());
    for (int k = 0; k < ncbps; ++k) {
        if (forward)
            out[size_t(map[size_t(k)])] = in[size_t(k)];
        else
            out[size_t(k)] = in[size_t(map[size_t(k)])];
    }
    return out;
}
}  // namespace

BitVector interleave(const BitVector& bits, int nbpsc, int ncbps) { return permute(bits, nbpsc, ncbps, true); }
BitVector deinterleave(const BitVector& bits, int nbpsc, int ncbps) { return permute(bits, nbpsc, ncbps, false); }
SoftVector deinterleave_soft(const SoftVector& vals, int nbpsc, int ncbps) { return permute(vals, nbpsc, ncbps, false); }

uint32_t crc32(const uint8_t* data, size_t len) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    uint32_t crc = 0xFFFFFFFFu;
    for (size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

uint32_t crc32(const ByteVector& data) { return crc32(data.data(), data.size()); }

}  // namespace cavlink
