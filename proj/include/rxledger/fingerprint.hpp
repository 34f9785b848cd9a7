#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rxledger {

inline constexpr std::size_t kTemplateBytes = 512;
inline constexpr std::size_t kTemplateBits = kTemplateBytes * 8;

/// Enrolled fingerprint, stored as opaque bytes.
using FingerprintTemplate = std::array<std::uint8_t, kTemplateBytes>;

/// Live capture payload. May be shorter or longer than a template; it is
/// zero-padded or truncated to kTemplateBytes before matching.
struct FingerprintScan {
    std::vector<std::uint8_t> bytes;
};

/// Zero-pads or truncates to exactly kTemplateBytes.
FingerprintTemplate normalize_template(std::span<const std::uint8_t> bytes) noexcept;

/// Number of differing bits.
std::size_t hamming_distance(const FingerprintTemplate& a, const FingerprintTemplate& b) noexcept;

/// 1 - hamming/4096. Exact in binary floating point: every value is k/4096.
double match_templates(const FingerprintTemplate& a, const FingerprintTemplate& b) noexcept;

/// Normalizes `scan` and scores it against `enrolled`. Throws EmptyScan.
double match_fingerprint(const FingerprintTemplate& enrolled, const FingerprintScan& scan);

}  // namespace rxledger
