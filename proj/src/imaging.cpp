#include "cavlink/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cavlink/bits.hpp"

namespace cavlink {

namespace {
constexpr uint8_t kMagic[4] = {'C', 'A', 'V', 'I'};

void put_u32(ByteVector& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const ByteVector& in, size_t at) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(in[at + size_t(i)]) << (8 * i);
    return v;
}
}  // namespace

ByteVector encode_image(const ByteVector& file_bytes) {
    if (file_bytes.empty()) throw std::invalid_argument("image file is empty");
    ByteVector out;
    out.reserve(kImageHeaderBytes + file_bytes.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, uint32_t(file_bytes.size()));
    put_u32(out, crc32(file_bytes));
    out.insert(out.end(), file_bytes.begin(), file_bytes.end());
    return out;
}

ImageDecodeResult decode_image(const ByteVector& payload) {
    ImageDecodeResult res;
    if (payload.size() < kImageHeaderBytes || std::memcmp(payload.data(), kMagic, 4) != 0) {
        res.integrity = ImageIntegrity::Truncated;
        return res;
    }
    const uint32_t length = get_u32(payload, 4);
    const uint32_t crc = get_u32(payload, 8);
    const size_t avail = payload.size() - kImageHeaderBytes;
    const size_t take = std::min<size_t>(length, avail);
    res.file_bytes.assign(payload.begin() + long(kImageHeaderBytes),
                          payload.begin() + long(kImageHeaderBytes + take));
    if (avail < length) {
        res.integrity = ImageIntegrity::Truncated;
    } else if (crc32(res.file_bytes) != crc) {
        res.integrity = ImageIntegrity::CrcMismatch;
    } else {
        res.integrity = ImageIntegrity::Exact;
    }
    return res;
}

std::pair<size_t, double> compare_images(const ByteVector& tx_bytes, const ByteVector& rx_bytes) {
    const size_t common = std::min(tx_bytes.size(), rx_bytes.size());
    size_t errors = std::max(tx_bytes.size(), rx_bytes.size()) - common;
    for (size_t i = 0; i < common; ++i)
        if (tx_bytes[i] != rx_bytes[i]) ++errors;
    const size_t denom = std::max<size_t>(1, std::max(tx_bytes.size(), rx_bytes.size()));
    return {errors, double(errors) / double(denom)};
}

ByteVector make_test_image() {
    constexpr int n = 64;
    ByteVector out;
    const std::string header = "P5\n64 64\n255\n";
    out.insert(out.end(), header.begin(), header.end());
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            // concentric rings over a diagonal gradient
            const double dx = x - 31.5, dy = y - 31.5;
            const double r = std::sqrt(dx * dx + dy * dy);
            const int ring = int(std::round(127.0 + 127.0 * std::cos(r / 3.0)));
            const int grad = (x + y) * 2;
            out.push_back(uint8_t((ring + grad) / 2 & 0xFF));
        }
    return out;
}

}  // namespace cavlink
