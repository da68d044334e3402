#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hfaid {

// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// Content identifier of an image file: SHA-256 truncated to 16 bytes,
// i.e. the first 32 hex characters.
std::string content_id(std::span<const std::uint8_t> bytes);

bool is_content_id(std::string_view id);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Stable 64-bit mix of a seed and a key, used to derive per-record seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace hfaid
