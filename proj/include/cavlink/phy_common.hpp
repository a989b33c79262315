#pragma once

#include <array>
#include <cstdint>

#include "cavlink/bits.hpp"
#include "cavlink/common.hpp"

namespace cavlink {

inline constexpr int kFftSize = 64;
inline constexpr int kCpLen = 16;
inline constexpr int kSymbolLen = kFftSize + kCpLen;  // 4 us at 20 Msps
inline constexpr int kNumDataCarriers = 48;
inline constexpr int kNumPilots = 4;
inline constexpr int kNumOccupied = 52;
inline constexpr double kSampleRate = 20e6;
inline constexpr int kServiceBits = 16;
inline constexpr int kTailBits = 6;
inline constexpr uint8_t kDefaultScramblerSeed = 0b1011101;

enum class Modulation { BPSK, QPSK, QAM16, QAM64 };

struct Mcs {
    int index = 0;
    Modulation modulation = Modulation::BPSK;
    CodeRate rate = CodeRate::Half;
    int bits_per_subcarrier = 1;   // N_BPSC
    int coded_bits_per_symbol = 48;  // N_CBPS
    int data_bits_per_symbol = 24;   // N_DBPS
    uint8_t rate_bits = 0;           // L-SIG RATE field, R1 in bit 0
};

/// Fixed non-HT MCS table, index 0..7.
const Mcs& mcs_table(int index);

/// Inverse lookup from the 4-bit L-SIG RATE field; -1 if not a valid pattern.
int mcs_from_rate_bits(uint8_t rate_bits);

/// Logical data subcarrier indices (-26..26 skipping 0, +-7, +-21), in order.
const std::array<int, kNumDataCarriers>& data_carrier_indices();

/// Pilot subcarrier indices and their base values.
const std::array<int, kNumPilots>& pilot_indices();
const std::array<double, kNumPilots>& pilot_values();

/// All 52 occupied logical subcarrier indices in ascending order.
const std::array<int, kNumOccupied>& occupied_carrier_indices();

/// 127-length pilot polarity sequence; L-SIG uses element 0, data symbol n uses (n+1) mod 127.
double pilot_polarity(int symbol_index_including_lsig);

/// L-LTF frequency-domain training values on logical subcarriers -26..26 (DC zero).
const std::array<double, 53>& lltf_sequence();

/// Map a logical subcarrier index (-26..26) to an FFT bin (0..63).
inline int carrier_to_bin(int k) { return (k + kFftSize) % kFftSize; }

/// Gray-map `bits_per_subcarrier` bits (first bit at bits[offset]) to one
/// constellation point with unit average energy.
Complex map_symbol(const BitVector& bits, size_t offset, Modulation mod);

/// Per-bit soft metrics for one received constellation point. `weight`
/// scales the metric before int8 quantization (channel reliability).
void demap_soft(Complex y, Modulation mod, double weight, SoftVector& out);

/// Nearest constellation point (decision-directed reference).
Complex nearest_point(Complex y, Modulation mod);

}  // namespace cavlink
