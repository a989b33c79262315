#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cavlink/metrics.hpp"

using namespace cavlink;

TEST_CASE("evm of identical vectors is zero") {
    const std::vector<Complex> v = {{1, 0}, {0, 1}, {-1, 0}, {0.5, -0.5}};
    const auto [rms, peak] = evm(v, v);
    CHECK(rms == doctest::Approx(0.0));
    CHECK(peak == doctest::Approx(0.0));
}

TEST_CASE("evm of a known fixed offset is exact") {
    // reference: unit-magnitude QPSK points, error: 0.1 on one of four symbols
    const std::vector<Complex> ref = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<Complex> rx = ref;
    rx[2] += Complex(0.1, 0.0);
    const auto [rms, peak] = evm(rx, ref);
    CHECK(rms == doctest::Approx(100.0 * std::sqrt(0.01 / 4.0)));  // 5%
    CHECK(peak == doctest::Approx(10.0));
}

TEST_CASE("evm normalizes by average reference power") {
    // scale everything by 3: relative EVM unchanged
    const std::vector<Complex> ref = {{3, 0}, {0, 3}};
    const std::vector<Complex> rx = {{3.3, 0}, {0, 3}};
    const auto [rms, peak] = evm(rx, ref);
    CHECK(rms == doctest::Approx(100.0 * std::sqrt(0.09 / 2.0) / 3.0));
    CHECK(peak == doctest::Approx(10.0));
}

TEST_CASE("evm rejects mismatched lengths") {
    CHECK_THROWS_AS(evm({{1, 0}}, {{1, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("ber counts flips and is not applicable after header failure") {
    const BitVector tx = {0, 1, 1, 0, 1, 0, 0, 1};
    BitVector rx = tx;
    rx[2] ^= 1;
    rx[5] ^= 1;
    const auto b = ber(tx, rx, true);
    REQUIRE(b.has_value());
    CHECK(*b == doctest::Approx(0.25));
    CHECK(ber(tx, tx, true).value() == doctest::Approx(0.0));
    CHECK_FALSE(ber(tx, rx, false).has_value());
}

TEST_CASE("cfo summary groups by mcs with correct mean and spread") {
    std::vector<PacketResult> results(5);
    for (int i = 0; i < 5; ++i) {
        results[size_t(i)].lsig = LsigInfo{i < 3 ? 0 : 7, 100};
        results[size_t(i)].sync.coarse_cfo_hz = i < 3 ? 1000.0 + 100.0 * i : 5000.0;
    }
    results.push_back({});  // header failure: no lsig, must be excluded
    results.back().sync.coarse_cfo_hz = 1e9;

    const auto summary = cfo_summary(results);
    REQUIRE(summary.size() == 2);
    CHECK(summary.at(0).count == 3);
    CHECK(summary.at(0).mean_hz == doctest::Approx(1100.0));
    CHECK(summary.at(0).std_hz == doctest::Approx(100.0));  // sample stddev, n - 1
    CHECK(summary.at(7).count == 2);
    CHECK(summary.at(7).mean_hz == doctest::Approx(5000.0));
    CHECK(summary.at(7).std_hz == doctest::Approx(0.0));
}

TEST_CASE("csi matrix takes the first decoded packet, at most 12 rows") {
    std::vector<PacketResult> results(2);
    results[0].status = PacketStatus::HeaderFail;  // skipped: nothing decoded
    results[1].status = PacketStatus::Ok;
    results[1].lsig = LsigInfo{0, 10};
    for (int sym = 0; sym < 20; ++sym)
        results[1].csi_per_symbol.emplace_back(52, Complex(double(sym + 1), 0.0));
    const auto csi = csi_matrix(results);
    REQUIRE(csi.size() == 12);
    CHECK(csi[0][0] == Complex(1.0));
    CHECK(csi[11][51] == Complex(12.0));
    CHECK(csi_matrix({results[0]}).empty());
}

TEST_CASE("csi spread is the max/min magnitude ratio in dB") {
    std::vector<std::vector<Complex>> csi = {{Complex(1.0), Complex(10.0), Complex(2.0)}};
    CHECK(csi_spread_db(csi) == doctest::Approx(20.0));
    CHECK(csi_spread_db({{Complex(3.0), Complex(3.0)}}) == doctest::Approx(0.0));
}

TEST_CASE("csv outputs carry the documented headers and row counts") {
    std::vector<EvmReport> evms = {{"CornerLoaded", 7, 5.5, 12.25, 86, true}};
    const std::string e = evm_csv(evms);
    CHECK(e.find("scenario,mcs,rms_percent,peak_percent") == 0);
    CHECK(e.find("CornerLoaded,7,") != std::string::npos);

    std::vector<std::vector<Complex>> csi = {{Complex(1.0), Complex(0.5)}};
    const std::string c = csi_csv(csi);
    CHECK(c.find("symbol,subcarrier,magnitude_db,phase_rad") == 0);
    CHECK(std::count(c.begin(), c.end(), '\n') == 3);  // header + 2 rows

    std::map<int, CfoSummary> sums = {{0, {123.0, 4.5, 10}}};
    const std::string f = cfo_csv(sums);
    CHECK(f.find("mcs,mean_hz,std_hz") == 0);
    CHECK(f.find("0,123") != std::string::npos);
}
