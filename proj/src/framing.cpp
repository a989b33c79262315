#include "cavlink/framing.hpp"

#include <algorithm>
#include <map>

#include "cavlink/bits.hpp"

namespace cavlink {

std::vector<Msdu> fragment(const ByteVector& payload, size_t msdu_length) {
    if (payload.empty()) throw std::invalid_argument("payload must be nonempty");
    if (msdu_length == 0) throw std::invalid_argument("msdu_length must be >= 1");
    const size_t n = (payload.size() + msdu_length - 1) / msdu_length;
    if (n > 16) throw std::invalid_argument("payload needs more than 16 fragments (4-bit fragment number)");
    std::vector<Msdu> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        Msdu m;
        const size_t begin = i * msdu_length;
        const size_t end = std::min(begin + msdu_length, payload.size());
        m.payload.assign(payload.begin() + long(begin), payload.begin() + long(end));
        m.index = uint16_t(i);
        m.total = uint16_t(n);
        out.push_back(std::move(m));
    }
    return out;
}

Mpdu build_mpdu(const Msdu& msdu, uint16_t sequence_number) {
    Mpdu m;
    m.header.sequence_number = uint16_t(sequence_number & 0x0FFF);
    m.header.fragment_number = uint8_t(msdu.index & 0x0F);
    m.header.more_fragments = msdu.index + 1 < msdu.total;
    m.body = msdu.payload;
    const size_t total = kMpduHeaderBytes + m.body.size() + kMpduFcsBytes;
    if (total > kMaxPsduBytes) throw std::invalid_argument("MPDU exceeds 4095-byte PSDU limit");
    // fcs filled by serialize_mpdu
    Psdu hdr = serialize_mpdu(m);
    m.fcs = crc32(hdr.data(), kMpduHeaderBytes + m.body.size());
    return m;
}

Psdu serialize_mpdu(const Mpdu& mpdu) {
    Psdu out;
    out.reserve(kMpduHeaderBytes + mpdu.body.size() + kMpduFcsBytes);
    out.push_back(uint8_t(mpdu.header.sequence_number & 0xFF));
    out.push_back(uint8_t(((mpdu.header.sequence_number >> 8) & 0x0F) << 4 | (mpdu.header.fragment_number & 0x0F)));
    out.push_back(uint8_t(mpdu.header.more_fragments ? 0x01 : 0x00));
    out.push_back(0x00);
    out.insert(out.end(), mpdu.body.begin(), mpdu.body.end());
    const uint32_t fcs = crc32(out.data(), out.size());
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t((fcs >> (8 * i)) & 0xFF));
    return out;
}

std::optional<Mpdu> parse_mpdu(const Psdu& psdu) {
    if (psdu.size() < kMpduHeaderBytes + kMpduFcsBytes) return std::nullopt;
    uint32_t fcs = 0;
    for (int i = 0; i < 4; ++i) fcs |= uint32_t(psdu[psdu.size() - 4 + size_t(i)]) << (8 * i);
    if (crc32(psdu.data(), psdu.size() - kMpduFcsBytes) != fcs) return std::nullopt;
    Mpdu m;
    m.header.sequence_number = uint16_t(psdu[0] | (uint16_t(psdu[1] >> 4) << 8));
    m.header.fragment_number = uint8_t(psdu[1] & 0x0F);
    m.header.more_fragments = (psdu[2] & 0x01) != 0;
    m.body.assign(psdu.begin() + long(kMpduHeaderBytes), psdu.end() - long(kMpduFcsBytes));
    m.fcs = fcs;
    return m;
}

ReassemblyResult reassemble(const std::vector<Mpdu>& mpdus) {
    ReassemblyResult res;
    std::map<uint8_t, const Mpdu*> by_frag;
    int last_frag = -1;
    for (const auto& m : mpdus) {
        by_frag[m.header.fragment_number] = &m;
        if (!m.header.more_fragments) last_frag = std::max(last_frag, int(m.header.fragment_number));
    }
    if (last_frag < 0) {
        // final fragment lost: total count unknown, report everything after the
        // highest seen index as missing via the open-ended marker
        for (uint8_t f = 0; by_frag.count(f) || int(f) <= (by_frag.empty() ? 0 : int(by_frag.rbegin()->first)); ++f)
            if (!by_frag.count(f)) res.missing.push_back(f);
        res.missing.push_back(uint16_t(by_frag.empty() ? 0 : by_frag.rbegin()->first + 1));
        res.complete = false;
        return res;
    }
    const int total = last_frag + 1;
    for (int f = 0; f < total; ++f)
        if (!by_frag.count(uint8_t(f))) res.missing.push_back(uint16_t(f));
    if (!res.missing.empty()) {
        res.complete = false;
        return res;
    }
    for (int f = 0; f < total; ++f) {
        const auto& body = by_frag[uint8_t(f)]->body;
        res.payload.insert(res.payload.end(), body.begin(), body.end());
    }
    res.complete = true;
    return res;
}

}  // namespace cavlink
