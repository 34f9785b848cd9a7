#include "support.hpp"

#include "rxledger/fingerprint.hpp"

#include <doctest.h>

#include <bit>

using namespace rxtest;

namespace {

// Independent bit counter: walks every bit instead of using popcount.
std::size_t slow_hamming(const FingerprintTemplate& a, const FingerprintTemplate& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < kTemplateBytes; ++i) {
        for (int bit = 0; bit < 8; ++bit) n += ((a[i] >> bit) & 1) != ((b[i] >> bit) & 1);
    }
    return n;
}

}  // namespace

TEST_CASE("identical templates score exactly 1") {
    const auto t = template_from_seed(7);
    CHECK(match_templates(t, t) == 1.0);
    CHECK(match_fingerprint(t, scan_of(t)) == 1.0);
}

TEST_CASE("bitwise complement scores exactly 0") {
    const auto t = template_from_seed(8);
    auto c = t;
    for (auto& b : c) b = static_cast<std::uint8_t>(~b);
    CHECK(hamming_distance(t, c) == 4096);
    CHECK(match_templates(t, c) == 0.0);
}

TEST_CASE("41 differing bits score 1 - 41/4096") {
    std::mt19937_64 rng(41);
    const auto t = template_from_seed(9);
    const auto p = flip_bits(t, 41, rng);
    CHECK(slow_hamming(t, p) == 41);
    CHECK(match_templates(t, p) == 1.0 - 41.0 / 4096.0);
    CHECK(match_templates(t, p) == doctest::Approx(0.98999).epsilon(1e-5));
}

TEST_CASE("10 percent flipped bits fall below the default threshold") {
    std::mt19937_64 rng(10);
    const auto t = template_from_seed(10);
    const auto p = flip_bits(t, 410, rng);
    CHECK(match_templates(t, p) < 0.95);
    CHECK(match_templates(t, p) == doctest::Approx(0.90).epsilon(0.001));
}

TEST_CASE("scans are zero-padded or truncated to 512 bytes") {
    const std::vector<std::uint8_t> short_scan = {0xFF, 0x01};
    const auto n = normalize_template(short_scan);
    CHECK(n[0] == 0xFF);
    CHECK(n[1] == 0x01);
    CHECK(std::all_of(n.begin() + 2, n.end(), [](auto b) { return b == 0; }));

    std::vector<std::uint8_t> long_scan(600, 0xAB);
    long_scan[511] = 0x11;
    const auto m = normalize_template(long_scan);
    CHECK(m[511] == 0x11);
    CHECK(m.size() == kTemplateBytes);

    const auto t = template_from_seed(3);
    auto extended = scan_of(t);
    extended.bytes.push_back(0x42);
    CHECK(match_fingerprint(t, extended) == 1.0);
}

TEST_CASE("empty scan is rejected") {
    const auto t = template_from_seed(1);
    CHECK(error_of([&] { match_fingerprint(t, FingerprintScan{}); }) == ErrorCode::EmptyScan);
}

TEST_CASE("property: symmetric, matches brute-force count, 1 iff equal") {
    std::mt19937_64 rng(20240501);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = template_from_seed(rng());
        const auto flips = static_cast<std::size_t>(rng() % 4097);
        const auto b = trial % 3 == 0 ? template_from_seed(rng()) : flip_bits(a, flips, rng);
        const auto d = slow_hamming(a, b);
        CHECK(hamming_distance(a, b) == d);
        CHECK(match_templates(a, b) == match_templates(b, a));
        CHECK(match_templates(a, b) == 1.0 - static_cast<double>(d) / 4096.0);
        CHECK((match_templates(a, b) == 1.0) == (a == b));
    }
}
