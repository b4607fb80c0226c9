#include "fwtriage/digest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace fwtriage {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Digest Digest::from_hex(std::string_view hex) {
  if (hex.size() != 2 * size) {
    throw std::invalid_argument("digest must be 64 hex characters, got " +
                                std::to_string(hex.size()));
  }
  std::array<std::uint8_t, size> out{};
  for (std::size_t i = 0; i < size; ++i) {
    const int hi = hex_value(hex[2 * i]);
    const int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("digest contains a non-hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return Digest(out);
}

std::string Digest::hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(2 * size, '0');
  for (std::size_t i = 0; i < size; ++i) {
    s[2 * i] = digits[bytes_[i] >> 4];
    s[2 * i + 1] = digits[bytes_[i] & 0xF];
  }
  return s;
}

Digest sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, Digest::size> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != Digest::size) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return Digest(out);
}

}  // namespace fwtriage
