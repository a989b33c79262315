#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cavlink/common.hpp"

namespace cavlink {

inline constexpr size_t kMaxPsduBytes = 4095;   // non-HT LENGTH field limit
inline constexpr size_t kDefaultMsduLength = 2304;
inline constexpr size_t kMpduHeaderBytes = 4;
inline constexpr size_t kMpduFcsBytes = 4;

struct Msdu {
    ByteVector payload;
    uint16_t index = 0;
    uint16_t total = 1;
};

struct MpduHeader {
    uint16_t sequence_number = 0;  // 12-bit
    uint8_t fragment_number = 0;   // 4-bit
    bool more_fragments = false;
};

struct Mpdu {
    MpduHeader header;
    ByteVector body;
    uint32_t fcs = 0;
};

using Psdu = ByteVector;

/// Split a payload into MSDUs of at most msdu_length bytes.
std::vector<Msdu> fragment(const ByteVector& payload, size_t msdu_length);

Mpdu build_mpdu(const Msdu& msdu, uint16_t sequence_number);

Psdu serialize_mpdu(const Mpdu& mpdu);

/// Parses and checks the FCS; nullopt on any corruption or truncation.
std::optional<Mpdu> parse_mpdu(const Psdu& psdu);

struct ReassemblyResult {
    ByteVector payload;
    bool complete = false;
    std::vector<uint16_t> missing;  // fragment indices not present
};

/// Order-independent reassembly keyed on fragment numbers.
ReassemblyResult reassemble(const std::vector<Mpdu>& mpdus);

}  // namespace cavlink
