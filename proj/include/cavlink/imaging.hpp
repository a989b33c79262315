#pragma once

#include <cstdint>
#include <string>

#include "cavlink/common.hpp"

namespace cavlink {

inline constexpr size_t kImageHeaderBytes = 12;  // magic + length + crc

enum class ImageIntegrity { Exact, CrcMismatch, Truncated };

/// Wrap raw file bytes in a 12-byte header {magic, original_length, crc32}.
ByteVector encode_image(const ByteVector& file_bytes);

struct ImageDecodeResult {
    ByteVector file_bytes;  // best effort
    ImageIntegrity integrity = ImageIntegrity::Truncated;
};

ImageDecodeResult decode_image(const ByteVector& payload);

/// Byte-granularity comparison; length differences count as errors.
std::pair<size_t, double> compare_images(const ByteVector& tx_bytes, const ByteVector& rx_bytes);

/// Deterministic 64x64 binary PGM test pattern.
ByteVector make_test_image();

}  // namespace cavlink
