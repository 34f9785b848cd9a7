#include "rxledger/fingerprint.hpp"

#include "rxledger/error.hpp"

#include <algorithm>
#include <bit>

namespace rxledger {

FingerprintTemplate normalize_template(std::span<const std::uint8_t> bytes) noexcept {
    FingerprintTemplate out{};
    std::copy_n(bytes.begin(), std::min(bytes.size(), kTemplateBytes), out.begin());
    return out;
}

std::size_t hamming_distance(const FingerprintTemplate& a, const FingerprintTemplate& b) noexcept {
    std::size_t bits = 0;
    for (std::size_t i = 0; i < kTemplateBytes; ++i) {
        bits += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    }
    return bits;
}

double match_templates(const FingerprintTemplate& a, const FingerprintTemplate& b) noexcept {
    return 1.0 - static_cast<double>(hamming_distance(a, b)) / static_cast<double>(kTemplateBits);
}

double match_fingerprint(const FingerprintTemplate& enrolled, const FingerprintScan& scan) {
    if (scan.bytes.empty()) throw Error(ErrorCode::EmptyScan, "fingerprint scan is empty");
    return match_templates(enrolled, normalize_template(scan.bytes));
}

}  // namespace rxledger
