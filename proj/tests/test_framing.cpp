#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cavlink/bits.hpp"
#include "cavlink/framing.hpp"

using namespace cavlink;

namespace {
ByteVector random_bytes(std::mt19937_64& rng, size_t n) {
    ByteVector v(n);
    for (auto& b : v) b = uint8_t(rng());
    return v;
}
}  // namespace

TEST_CASE("fragmentation splits 5000 bytes into 2304 + 2304 + 392") {
    std::mt19937_64 rng(1);
    const ByteVector payload = random_bytes(rng, 5000);
    const auto frags = fragment(payload, 2304);
    REQUIRE(frags.size() == 3);
    CHECK(frags[0].payload.size() == 2304);
    CHECK(frags[1].payload.size() == 2304);
    CHECK(frags[2].payload.size() == 392);
    for (size_t i = 0; i < frags.size(); ++i) {
        CHECK(frags[i].index == i);
        CHECK(frags[i].total == 3);
    }
    ByteVector joined;
    for (const auto& f : frags) joined.insert(joined.end(), f.payload.begin(), f.payload.end());
    CHECK(joined == payload);
}

TEST_CASE("fragmentation of an exact multiple produces no short tail") {
    std::mt19937_64 rng(2);
    const auto frags = fragment(random_bytes(rng, 4608), 2304);
    REQUIRE(frags.size() == 2);
    CHECK(frags[1].payload.size() == 2304);
}

TEST_CASE("fragment count is limited by the 4-bit fragment-number field") {
    const ByteVector big(17 * 100, 0xAB);
    CHECK_THROWS_AS(fragment(big, 100), std::invalid_argument);
    CHECK_NOTHROW(fragment(ByteVector(16 * 100, 0xAB), 100));
}

TEST_CASE("a 2304-byte MSDU serializes to a 2312-byte PSDU") {
    std::mt19937_64 rng(3);
    Msdu msdu{random_bytes(rng, 2304), 0, 1};
    const Psdu psdu = serialize_mpdu(build_mpdu(msdu, 7));
    CHECK(psdu.size() == 2312);
}

TEST_CASE("mpdu round trip preserves header fields and body") {
    std::mt19937_64 rng(4);
    Msdu msdu{random_bytes(rng, 999), 5, 9};
    const Mpdu mpdu = build_mpdu(msdu, 0xABC);
    CHECK(mpdu.header.sequence_number == 0xABC);
    CHECK(mpdu.header.fragment_number == 5);
    CHECK(mpdu.header.more_fragments);

    const Psdu psdu = serialize_mpdu(mpdu);
    const auto parsed = parse_mpdu(psdu);
    REQUIRE(parsed.has_value());
    CHECK(parsed->header.sequence_number == 0xABC);
    CHECK(parsed->header.fragment_number == 5);
    CHECK(parsed->header.more_fragments);
    CHECK(parsed->body == msdu.payload);
}

TEST_CASE("serialized fcs equals crc32 over header plus body") {
    std::mt19937_64 rng(5);
    Msdu msdu{random_bytes(rng, 64), 0, 1};
    const Psdu psdu = serialize_mpdu(build_mpdu(msdu, 1));
    REQUIRE(psdu.size() == 64 + kMpduHeaderBytes + kMpduFcsBytes);
    const ByteVector covered(psdu.begin(), psdu.end() - long(kMpduFcsBytes));
    uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
        stored |= uint32_t(psdu[psdu.size() - 4 + size_t(i)]) << (8 * i);
    CHECK(stored == crc32(covered));
}

TEST_CASE("any single corrupted byte fails the fcs check") {
    std::mt19937_64 rng(6);
    Msdu msdu{random_bytes(rng, 128), 0, 1};
    const Psdu psdu = serialize_mpdu(build_mpdu(msdu, 2));
    for (size_t i = 0; i < psdu.size(); ++i) {
        Psdu bad = psdu;
        bad[i] ^= 0x40;
        CHECK_FALSE(parse_mpdu(bad).has_value());
    }
}

TEST_CASE("truncated psdus are rejected") {
    CHECK_FALSE(parse_mpdu(Psdu{}).has_value());
    CHECK_FALSE(parse_mpdu(Psdu(7, 0)).has_value());
}

TEST_CASE("reassembly is order independent") {
    std::mt19937_64 rng(7);
    const ByteVector payload = random_bytes(rng, 3 * 700 + 123);
    const auto frags = fragment(payload, 700);
    std::vector<Mpdu> mpdus;
    for (const auto& f : frags) mpdus.push_back(build_mpdu(f, 0));
    std::shuffle(mpdus.begin(), mpdus.end(), rng);
    const auto res = reassemble(mpdus);
    CHECK(res.complete);
    CHECK(res.missing.empty());
    CHECK(res.payload == payload);
}

TEST_CASE("reassembly reports missing fragments") {
    std::mt19937_64 rng(8);
    const ByteVector payload = random_bytes(rng, 4 * 500);
    const auto frags = fragment(payload, 500);
    std::vector<Mpdu> mpdus;
    for (const auto& f : frags)
        if (f.index != 1) mpdus.push_back(build_mpdu(f, 0));
    const auto res = reassemble(mpdus);
    CHECK_FALSE(res.complete);
    REQUIRE(res.missing.size() == 1);
    CHECK(res.missing[0] == 1);
}

TEST_CASE("fragment/build/serialize/parse/reassemble round trip") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const size_t n = 1 + rng() % 9000;
        const ByteVector payload = random_bytes(rng, n);
        const auto frags = fragment(payload, 2304);
        std::vector<Mpdu> rx;
        for (const auto& f : frags) {
            const auto parsed = parse_mpdu(serialize_mpdu(build_mpdu(f, uint16_t(trial))));
            REQUIRE(parsed.has_value());
            rx.push_back(*parsed);
        }
        const auto res = reassemble(rx);
        CHECK(res.complete);
        CHECK(res.payload == payload);
    }
}
