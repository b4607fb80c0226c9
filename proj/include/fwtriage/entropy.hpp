#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwtriage/digest.hpp"

namespace fwtriage {

class FirmwareImage;

inline constexpr std::size_t default_window_size = 4096;
inline constexpr double default_low_threshold = 1.0;
inline constexpr double default_high_threshold = 7.0;

/// Shannon entropy of the byte histogram, in bits/byte, clamped to [0, 8].
/// Throws std::invalid_argument on an empty window.
double window_entropy(std::span<const std::uint8_t> window);

enum class Band { low, mid, high };
std::string_view to_string(Band b);

struct ProfileOptions {
  std::size_t window_size = default_window_size;
  double low_threshold = default_low_threshold;
  double high_threshold = default_high_threshold;
};

/// Low is strictly below the low threshold, high strictly above the high one.
Band classify(double entropy, double low_threshold, double high_threshold);

struct EntropyProfile {
  std::size_t window_size = default_window_size;
  std::vector<double> window_entropies;
  std::vector<std::uint64_t> window_offsets;
  double mean = 0.0;
  double std = 0.0;  // population
  double low_fraction = 0.0;
  double high_fraction = 0.0;
  double low_threshold = default_low_threshold;
  double high_threshold = default_high_threshold;
  std::uint64_t dropped_bytes = 0;  // trailing partial window
  // Provenance of the profiled image.
  Digest source_digest;
  std::uint64_t source_length = 0;

  std::size_t window_count() const { return window_entropies.size(); }
  Band band_at(std::size_t i) const {
    return classify(window_entropies[i], low_threshold, high_threshold);
  }

  friend bool operator==(const EntropyProfile&, const EntropyProfile&) = default;
};

/// Non-overlapping windows of opts.window_size; a trailing partial window is
/// dropped and its length recorded. Throws insufficient_data_error when the
/// payload is shorter than one window.
EntropyProfile profile(const FirmwareImage& image, const ProfileOptions& opts = {});

/// Builds the summary statistics for an already computed entropy series.
EntropyProfile summarize_windows(std::vector<double> window_entropies,
                                 const ProfileOptions& opts = {});

enum class ProfileFormat { csv, json };

/// CSV: header `offset,entropy_bits_per_byte`, six decimals. JSON: every field.
std::string emit_profile(const EntropyProfile& p, ProfileFormat format);
EntropyProfile parse_profile_json(std::string_view text);

}  // namespace fwtriage
