#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace idp::util {

/// Fills `out` from the kernel's cryptographically strong generator.
/// Throws std::system_error when the generator is unavailable.
void secure_random(std::span<std::byte> out);

/// `length` characters drawn uniformly from `alphabet` (at most 256 symbols)
/// by rejection sampling over secure random bytes.
std::string random_token(std::size_t length, std::string_view alphabet);

inline constexpr std::string_view kBase36 = "0123456789abcdefghijklmnopqrstuvwxyz";
inline constexpr std::string_view kHex = "0123456789abcdef";

}  // namespace idp::util
