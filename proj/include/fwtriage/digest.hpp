#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fwtriage {

/// SHA-256 digest of an image payload.
class Digest {
 public:
  static constexpr std::string_view algorithm = "SHA-256";
  static constexpr std::size_t size = 32;

  Digest() = default;
  explicit Digest(const std::array<std::uint8_t, size>& bytes) : bytes_(bytes) {}

  /// Parses 64 hex characters (either case). Throws std::invalid_argument.
  static Digest from_hex(std::string_view hex);

  const std::array<std::uint8_t, size>& bytes() const { return bytes_; }

  /// Lowercase, no separators, always 64 characters.
  std::string hex() const;

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;

 private:
  std::array<std::uint8_t, size> bytes_{};
};

Digest sha256(std::span<const std::uint8_t> data);

}  // namespace fwtriage
