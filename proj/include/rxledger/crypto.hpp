#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rxledger::crypto {

std::vector<std::uint8_t> random_bytes(std::size_t count);

/// Lowercase hex of `count` random bytes.
std::string random_token(std::size_t count);

/// PBKDF2-HMAC-SHA256, 32-byte output.
std::vector<std::uint8_t> derive_password_digest(std::string_view password,
                                                 std::span<const std::uint8_t> salt,
                                                 int iterations);

/// Constant-time equality.
bool equal_digests(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) noexcept;

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws Error(InvalidArgument) on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace rxledger::crypto
