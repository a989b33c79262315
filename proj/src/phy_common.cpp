#include "cavlink/phy_common.hpp"

#include <algorithm>
#include <cmath>

namespace cavlink {

namespace {

const std::array<Mcs, 8> kMcsTable = {{
    {0, Modulation::BPSK, CodeRate::Half, 1, 48, 24, 0b1011},           // 6 Mb/s, RATE 1101 (R1 first)
    {1, Modulation::BPSK, CodeRate::ThreeQuarters, 1, 48, 36, 0b1111},  // 9
    {2, Modulation::QPSK, CodeRate::Half, 2, 96, 48, 0b1010},           // 12, RATE 0101
    {3, Modulation::QPSK, CodeRate::ThreeQuarters, 2, 96, 72, 0b1110},  // 18, RATE 0111
    {4, Modulation::QAM16, CodeRate::Half, 4, 192, 96, 0b1001},         // 24, RATE 1001
    {5, Modulation::QAM16, CodeRate::ThreeQuarters, 4, 192, 144, 0b1101},  // 36, RATE 1011
    {6, Modulation::QAM64, CodeRate::TwoThirds, 6, 288, 192, 0b1000},   // 48, RATE 0001
    {7, Modulation::QAM64, CodeRate::ThreeQuarters, 6, 288, 216, 0b1100},  // 54, RATE 0011
}};
// rate_bits stores R1 in bit 0, R4 in bit 3. E.g. RATE "1101" (R1..R4) -> 0b1011.

constexpr double kQpskNorm = 0.7071067811865476;    // 1/sqrt(2)
constexpr double kQam16Norm = 0.31622776601683794;  // 1/sqrt(10)
constexpr double kQam64Norm = 0.1543033499620919;   // 1/sqrt(42)

}  // namespace

const Mcs& mcs_table(int index) {
    if (index < 0 || index > 7) throw std::invalid_argument("MCS index out of range");
    return kMcsTable[size_t(index)];
}

int mcs_from_rate_bits(uint8_t rate_bits) {
    for (const auto& m : kMcsTable)
        if (m.rate_bits == rate_bits) return m.index;
    return -1;
}

const std::array<int, kNumDataCarriers>& data_carrier_indices() {
    static const auto idx = [] {
        std::array<int, kNumDataCarriers> a{};
        int n = 0;
        for (int k = -26; k <= 26; ++k) {
            if (k == 0 || k == 7 || k == -7 || k == 21 || k == -21) continue;
            a[size_t(n++)] = k;
        }
        return a;
    }();
    return idx;
}

const std::array<int, kNumPilots>& pilot_indices() {
    static const std::array<int, kNumPilots> idx = {-21, -7, 7, 21};
    return idx;
}

const std::array<double, kNumPilots>& pilot_values() {
    static const std::array<double, kNumPilots> val = {1.0, 1.0, 1.0, -1.0};
    return val;
}

const std::array<int, kNumOccupied>& occupied_carrier_indices() {
    static const auto idx = [] {
        std::array<int, kNumOccupied> a{};
        int n = 0;
        for (int k = -26; k <= 26; ++k)
            if (k != 0) a[size_t(n++)] = k;
        return a;
    }();
    return idx;
}

double pilot_polarity(int symbol_index_including_lsig) {
    static const std::array<int8_t, 127> p = {
        1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, -1, 1, 1, -1, 1,
        -1, -1, 1, 1, -1, 1, 1, -1, 1, 1, 1, 1, 1, 1, -1, 1,
        1, 1, -1, 1, 1, -1, -1, 1, 1, 1, -1, 1, -1, -1, -1, 1,
        -1, 1, -1, -1, 1, -1, -1, 1, 1, 1, 1, 1, -1, -1, 1, 1,
        -1, -1, 1, -1, 1, -1, 1, 1, -1, -1, -1, 1, 1, -1, -1, -1,
        -1, 1, -1, -1, 1, -1, 1, 1, 1, 1, -1, 1, -1, 1, -1, 1,
        -1, -1, -1, -1, -1, 1, -1, 1, 1, -1, 1, -1, 1, 1, 1, -1,
        -1, 1, -1, -1, -1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1};
    return double(p[size_t(symbol_index_including_lsig % 127)]);
}

const std::array<double, 53>& lltf_sequence() {
    static const std::array<double, 53> seq = {
        1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1,
        0,
        1, -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1};
    return seq;
}

Complex map_symbol(const BitVector& bits, size_t offset, Modulation mod) {
    auto bit = [&](size_t i) { return int(bits[offset + i]); };
    switch (mod) {
        case Modulation::BPSK:
            return Complex(2.0 * bit(0) - 1.0, 0.0);
        case Modulation::QPSK:
            return Complex((2.0 * bit(0) - 1.0) * kQpskNorm, (2.0 * bit(1) - 1.0) * kQpskNorm);
        case Modulation::QAM16: {
            const double i = (2.0 * bit(0) - 1.0) * (3.0 - 2.0 * bit(1));
            const double q = (2.0 * bit(2) - 1.0) * (3.0 - 2.0 * bit(3));
            return Complex(i * kQam16Norm, q * kQam16Norm);
        }
        case Modulation::QAM64: {
            auto axis = [&](size_t b) {
                const double sign = 2.0 * bit(b) - 1.0;
                const double mag = bit(b + 1) ? (1.0 + 2.0 * bit(b + 2)) : (7.0 - 2.0 * bit(b + 2));
                return sign * mag;
            };
            return Complex(axis(0) * kQam64Norm, axis(3) * kQam64Norm);
        }
    }
    return {};
}

namespace {

inline int8_t quantize(double v) {
    const double q = std::round(v);
    return int8_t(std::clamp(q, -127.0, 127.0));
}

}  // namespace

void demap_soft(Complex y, Modulation mod, double weight, SoftVector& out) {
    // max-log metrics for Gray-mapped axes, scaled into the int8 range
    const double w = 64.0 * weight;
    switch (mod) {
        case Modulation::BPSK:
            out.push_back(quantize(w * y.real()));
            break;
        case Modulation::QPSK:
            out.push_back(quantize(w * y.real()));
            out.push_back(quantize(w * y.imag()));
            break;
        case Modulation::QAM16:
            for (double v : {y.real(), y.imag()}) {
                out.push_back(quantize(w * v));
                out.push_back(quantize(w * (2.0 * kQam16Norm - std::abs(v))));
            }
            break;
        case Modulation::QAM64:
            for (double v : {y.real(), y.imag()}) {
                out.push_back(quantize(w * v));
                out.push_back(quantize(w * (4.0 * kQam64Norm - std::abs(v))));
                out.push_back(quantize(w * (2.0 * kQam64Norm - std::abs(std::abs(v) - 4.0 * kQam64Norm))));
            }
            break;
    }
}

Complex nearest_point(Complex y, Modulation mod) {
    auto slice = [](double v, double norm, int levels) {
        double best = 0.0, bd = 1e300;
        for (int a = -(levels - 1); a <= levels - 1; a += 2) {
            const double p = a * norm;
            const double d = std::abs(v - p);
            if (d < bd) {
                bd = d;
                best = p;
            }
        }
        return best;
    };
    switch (mod) {
        case Modulation::BPSK:
            return Complex(y.real() >= 0 ? 1.0 : -1.0, 0.0);
        case Modulation::QPSK:
            return Complex(slice(y.real(), kQpskNorm, 2), slice(y.imag(), kQpskNorm, 2));
        case Modulation::QAM16:
            return Complex(slice(y.real(), kQam16Norm, 4), slice(y.imag(), kQam16Norm, 4));
        case Modulation::QAM64:
            return Complex(slice(y.real(), kQam64Norm, 8), slice(y.imag(), kQam64Norm, 8));
    }
    return {};
}

}  // namespace cavlink
