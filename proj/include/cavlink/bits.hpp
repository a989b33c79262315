#pragma once

#include <cstdint>
#include <vector>

#include "cavlink/common.hpp"

namespace cavlink {

/// Convolutional code rates used by the eight non-HT MCS.
enum class CodeRate { Half, TwoThirds, ThreeQuarters };

// Soft decisions: signed 8-bit log-likelihoods, positive means bit 1.
// An erasure (punctured position) carries metric 0.
using SoftVector = std::vector<int8_t>;

inline constexpr int8_t kSoftMax = 127;
inline constexpr int8_t kErasure = 0;

/// Additive LFSR scrambler, polynomial x^7 + x^4 + 1. Self-inverse.
/// seed must be a nonzero 7-bit value.
BitVector scramble(const BitVector& data, uint8_t seed);

/// Output of the scrambler LFSR alone (the sequence XORed onto the data).
BitVector scrambler_sequence(uint8_t seed, size_t n);

/// Rate-1/2 K=7 convolutional encoder, generators 133/171 (octal).
/// Encoder starts in the all-zero state; the caller supplies tail bits.
BitVector conv_encode(const BitVector& data);

BitVector puncture(const BitVector& coded, CodeRate rate);

/// Reinsert erasures (metric 0) at punctured positions.
SoftVector depuncture(const SoftVector& punctured, CodeRate rate);

/// Number of coded bits after puncturing a stream of 2*n_info bits.
size_t punctured_length(size_t n_info, CodeRate rate);

/// Maximum-likelihood sequence decoder for the K=7 code, full traceback.
/// llrs holds one value per (depunctured) coded bit, i.e. 2*n_info values.
BitVector viterbi_decode(const SoftVector& llrs, size_t n_info);

/// Convenience wrapper: depuncture then decode.
BitVector viterbi_decode_punctured(const SoftVector& punctured, CodeRate rate, size_t n_info);

/// Two-permutation block interleaver; block length must equal coded_bits_per_symbol.
BitVector interleave(const BitVector& bits, int bits_per_subcarrier, int coded_bits_per_symbol);
BitVector deinterleave(const BitVector& bits, int bits_per_subcarrier, int coded_bits_per_symbol);
SoftVector deinterleave_soft(const SoftVector& vals, int bits_per_subcarrier, int coded_bits_per_symbol);

/// Index mapping used by interleave: out[map[k]] = in[k].
std::vector<int> interleaver_map(int bits_per_subcarrier, int coded_bits_per_symbol);

/// Reflected CRC-32 (poly 0x04C11DB7, init/xorout 0xFFFFFFFF).
uint32_t crc32(const uint8_t* data, size_t len);
uint32_t crc32(const ByteVector& data);

}  // namespace cavlink
