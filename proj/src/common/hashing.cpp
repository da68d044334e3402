#include "hfaid/common/hashing.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <cstring>

#include "hfaid/common/error.hpp"

namespace hfaid {
namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(n * 2, '0');
  for (std::size_t i = 0; i < n; ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 0x0f];
  }
  return out;
}

std::array<unsigned char, SHA256_DIGEST_LENGTH> digest(const void* data, std::size_t n) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
  SHA256(static_cast<const unsigned char*>(data), n, md.data());
  return md;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  const auto md = digest(bytes.data(), bytes.size());
  return to_hex(md.data(), md.size());
}

std::string sha256_hex(std::string_view text) {
  const auto md = digest(text.data(), text.size());
  return to_hex(md.data(), md.size());
}

std::string content_id(std::span<const std::uint8_t> bytes) {
  const auto md = digest(bytes.data(), bytes.size());
  return to_hex(md.data(), 16);
}

bool is_content_id(std::string_view id) {
  if (id.size() != 32) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4 + 1);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw FormatError("base64: invalid input");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t len = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() > 1 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
  std::string material(8, '\0');
  for (int i = 0; i < 8; ++i) material[static_cast<std::size_t>(i)] = static_cast<char>((seed >> (8 * i)) & 0xff);
  material.append(key);
  const auto md = digest(material.data(), material.size());
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | md[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace hfaid
