#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cavlink {

using Complex = std::complex<double>;

// Bits are stored one per byte, value 0 or 1, LSB-first within octets.
using BitVector = std::vector<uint8_t>;
using ByteVector = std::vector<uint8_t>;

/// Complex baseband sample stream; the unit of everything over-the-air.
struct IqWaveform {
    std::vector<Complex> samples;
    double sample_rate = 20e6;
};

inline BitVector bytes_to_bits(const ByteVector& bytes) {
    BitVector bits;
    bits.reserve(bytes.size() * 8);
    for (uint8_t b : bytes)
        for (int i = 0; i < 8; ++i) bits.push_back((b >> i) & 1);
    return bits;
}

inline ByteVector bits_to_bytes(const BitVector& bits) {
    if (bits.size() % 8 != 0) throw std::invalid_argument("bit count not a multiple of 8");
    ByteVector bytes(bits.size() / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= uint8_t(1u << (i % 8));
    return bytes;
}

// Unitary in-place radix-2 FFT (1/sqrt(N) both directions). N must be a power of two.
void fft_inplace(std::vector<Complex>& x, bool inverse);

std::vector<Complex> fft(const std::vector<Complex>& x, bool inverse);

}  // namespace cavlink
