#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fwtriage/digest.hpp"
#include "fwtriage/entropy.hpp"
#include "fwtriage/signatures.hpp"

namespace fwtriage {

class FirmwareImage;

enum class TierResult { pass, fail, unevaluated };
enum class ContentClass { validated_firmware, erased, indeterminate };
enum class LayoutCharacter { dense, sparse, empty, mixed };
enum class OverallStatus { validated, incomplete };

std::string_view to_string(TierResult v);
std::string_view to_string(ContentClass v);
std::string_view to_string(LayoutCharacter v);
std::string_view to_string(OverallStatus v);

// Tier-3 cut points.
inline constexpr double erased_low_fraction = 0.85;
inline constexpr double dense_high_fraction = 0.5;
inline constexpr double sparse_low_fraction = 0.3;

TierResult tier1_size(const FirmwareImage& image);
TierResult tier2_consistency(std::span<const Digest> digests);

struct ContentAssessment {
  ContentClass classification = ContentClass::indeterminate;
  LayoutCharacter layout = LayoutCharacter::mixed;

  friend bool operator==(const ContentAssessment&, const ContentAssessment&) = default;
};

/// Throws std::invalid_argument if the profile and scan describe different images.
ContentAssessment tier3_content(const EntropyProfile& profile, const ScanResult& scan);

OverallStatus overall_status(TierResult tier1, TierResult tier2, ContentClass tier3);

struct Evidence {
  std::uint64_t observed_size = 0;
  std::uint64_t declared_capacity = 0;
  std::vector<std::uint64_t> read_sizes;
  std::vector<std::string> digests;  // hex, one per read
  std::size_t distinct_digests = 0;
  std::optional<double> mean;
  std::optional<double> std;
  std::optional<double> low_fraction;
  std::optional<double> high_fraction;
  std::size_t window_count = 0;
  std::vector<std::pair<std::uint64_t, Format>> signatures;
  std::vector<std::string> notes;
};

struct ValidationVerdict {
  TierResult tier1 = TierResult::fail;
  TierResult tier2 = TierResult::unevaluated;
  ContentClass tier3 = ContentClass::indeterminate;
  LayoutCharacter layout_character = LayoutCharacter::mixed;
  OverallStatus overall = OverallStatus::incomplete;
  Evidence evidence;

  /// "TIER1/TIER2/TIER3", e.g. "PASS/PASS/VALIDATED_FIRMWARE".
  std::string summary() const;
};

/// Three-tier verdict for repeated reads of one target. Throws
/// std::invalid_argument on an empty set or mixed model/capacity.
ValidationVerdict validate(std::span<const FirmwareImage> images,
                           const ProfileOptions& opts = {});

std::string verdict_to_json(const ValidationVerdict& v);
/// Three tier lines followed by the overall status.
std::string verdict_to_text(const ValidationVerdict& v);

struct Region {
  std::uint64_t start = 0;
  std::uint64_t end = 0;  // exclusive
  Band band = Band::low;
  std::vector<Format> labels;  // sorted, unique

  friend bool operator==(const Region&, const Region&) = default;
};

struct RegionMap {
  std::size_t window_size = default_window_size;
  std::vector<Region> regions;
};

/// Consecutive windows of the same band merged into regions; hits whose
/// offset falls inside a region label it. Same provenance rule as tier3_content.
RegionMap layout_map(const EntropyProfile& profile, const ScanResult& scan);

std::string region_map_to_json(const RegionMap& map);

/// One character per `windows_per_char` windows: '.' low, '-' mid, '#' high.
/// Each character shows the most common band in its group.
std::string render_region_bar(const EntropyProfile& profile, std::size_t windows_per_char);

}  // namespace fwtriage
