#pragma once

#include <cstddef>
#include <cstdint>

namespace fwtriage {

/// SplitMix64 (Steele, Lea, Flood 2014). Fixture bytes are the little-endian
/// bytes of successive outputs, so any implementation of the same constants
/// reproduces them exactly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// next() % bound; the modulo bias is irrelevant for fixtures.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  std::uint8_t next_byte() {
    if (buffered_ == 0) {
      buffer_ = next();
      buffered_ = 8;
    }
    const auto b = static_cast<std::uint8_t>(buffer_ & 0xFF);
    buffer_ >>= 8;
    --buffered_;
    return b;
  }

 private:
  std::uint64_t state_;
  std::uint64_t buffer_ = 0;
  int buffered_ = 0;
};

}  // namespace fwtriage
