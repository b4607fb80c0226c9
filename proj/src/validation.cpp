#include "fwtriage/validation.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <json.hpp>
#include <set>
#include <stdexcept>

#include "fwtriage/errors.hpp"
#include "fwtriage/image.hpp"

namespace fwtriage {

std::string_view to_string(TierResult v) {
  switch (v) {
    case TierResult::pass: return "PASS";
    case TierResult::fail: return "FAIL";
    case TierResult::unevaluated: return "UNEVALUATED";
  }
  return "?";
}

std::string_view to_string(ContentClass v) {
  switch (v) {
    case ContentClass::validated_firmware: return "VALIDATED_FIRMWARE";
    case ContentClass::erased: return "ERASED";
    case ContentClass::indeterminate: return "INDETERMINATE";
  }
  return "?";
}

std::string_view to_string(LayoutCharacter v) {
  switch (v) {
    case LayoutCharacter::dense: return "DENSE";
    case LayoutCharacter::sparse: return "SPARSE";
    case LayoutCharacter::empty: return "EMPTY";
    case LayoutCharacter::mixed: return "MIXED";
  }
  return "?";
}

std::string_view to_string(OverallStatus v) {
  return v == OverallStatus::validated ? "VALIDATED" : "INCOMPLETE";
}

TierResult tier1_size(const FirmwareImage& image) {
  return image.size() == image.declared_capacity() ? TierResult::pass : TierResult::fail;
}

TierResult tier2_consistency(std::span<const Digest> digests) {
  if (digests.size() < 2) return TierResult::unevaluated;
  const bool same = std::all_of(digests.begin(), digests.end(),
                                [&](const Digest& d) { return d == digests.front(); });
  return same ? TierResult::pass : TierResult::fail;
}

namespace {

void require_same_source(const EntropyProfile& profile, const ScanResult& scan) {
  if (profile.source_digest != scan.source_digest ||
      profile.source_length != scan.source_length) {
    throw std::invalid_argument("entropy profile and signature scan come from different images");
  }
}

}  // namespace

ContentAssessment tier3_content(const EntropyProfile& profile, const ScanResult& scan) {
  require_same_source(profile, scan);
  bool kernel = false, filesystem = false, bootloader = false;
  for (const auto& h : scan.hits) {
    switch (h.format_class) {
      case FormatClass::kernel: kernel = true; break;
      case FormatClass::filesystem: filesystem = true; break;
      case FormatClass::bootloader_stage: bootloader = true; break;
      default: break;
    }
  }
  const bool mostly_erased = profile.low_fraction >= erased_low_fraction;
  if (mostly_erased && !kernel && !filesystem && !bootloader) {
    return {ContentClass::erased, LayoutCharacter::empty};
  }
  if (kernel && filesystem) {
    LayoutCharacter layout = LayoutCharacter::mixed;
    if (profile.high_fraction >= dense_high_fraction) {
      layout = LayoutCharacter::dense;
    } else if (profile.low_fraction >= sparse_low_fraction) {
      layout = LayoutCharacter::sparse;
    }
    return {ContentClass::validated_firmware, layout};
  }
  return {ContentClass::indeterminate,
          mostly_erased ? LayoutCharacter::empty : LayoutCharacter::mixed};
}

OverallStatus overall_status(TierResult tier1, TierResult tier2, ContentClass tier3) {
  return tier1 == TierResult::pass && tier2 == TierResult::pass &&
                 tier3 == ContentClass::validated_firmware
             ? OverallStatus::validated
             : OverallStatus::incomplete;
}

std::string ValidationVerdict::summary() const {
  return std::string(to_string(tier1)) + "/" + std::string(to_string(tier2)) + "/" +
         std::string(to_string(tier3));
}

ValidationVerdict validate(std::span<const FirmwareImage> images, const ProfileOptions& opts) {
  if (images.empty()) throw std::invalid_argument("validation needs at least one image");
  const auto& first = images.front();
  for (const auto& img : images) {
    if (img.metadata().device_model != first.metadata().device_model) {
      throw std::invalid_argument("images belong to different device models");
    }
    if (img.declared_capacity() != first.declared_capacity()) {
      throw std::invalid_argument("images declare different capacities");
    }
  }

  ValidationVerdict v;
  Evidence& ev = v.evidence;
  ev.observed_size = first.size();
  ev.declared_capacity = first.declared_capacity();

  v.tier1 = tier1_size(first);
  std::vector<Digest> digests;
  std::set<Digest> distinct;
  for (const auto& img : images) {
    ev.read_sizes.push_back(img.size());
    ev.digests.push_back(img.digest().hex());
    digests.push_back(img.digest());
    distinct.insert(img.digest());
    if (tier1_size(img) != v.tier1) {
      ev.notes.push_back("reads disagree on size check: " + std::to_string(img.size()) +
                         " bytes vs " + std::to_string(first.size()));
    }
  }
  ev.distinct_digests = distinct.size();
  v.tier2 = tier2_consistency(digests);
  if (v.tier2 == TierResult::unevaluated) {
    ev.notes.push_back("single read; hash self-consistency needs repeated reads");
  }

  // Tier 3 is still assessed when earlier tiers fail; the first read stands in.
  try {
    const auto prof = profile(first, opts);
    const auto hits = scan(first);
    const auto content = tier3_content(prof, hits);
    v.tier3 = content.classification;
    v.layout_character = content.layout;
    ev.mean = prof.mean;
    ev.std = prof.std;
    ev.low_fraction = prof.low_fraction;
    ev.high_fraction = prof.high_fraction;
    ev.window_count = prof.window_count();
    for (const auto& h : hits.hits) ev.signatures.emplace_back(h.offset, h.format);
  } catch (const insufficient_data_error& e) {
    v.tier3 = ContentClass::indeterminate;
    v.layout_character = LayoutCharacter::mixed;
    ev.notes.push_back(std::string("content not assessed: ") + e.what());
  }
  v.overall = overall_status(v.tier1, v.tier2, v.tier3);
  return v;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string verdict_to_json(const ValidationVerdict& v) {
  nlohmann::ordered_json j;
  j["tier1"] = to_string(v.tier1);
  j["tier2"] = to_string(v.tier2);
  j["tier3"] = to_string(v.tier3);
  j["layout_character"] = to_string(v.layout_character);
  j["overall"] = to_string(v.overall);
  j["summary"] = v.summary();
  const auto& ev = v.evidence;
  nlohmann::ordered_json e;
  e["observed_size"] = ev.observed_size;
  e["declared_capacity"] = ev.declared_capacity;
  e["read_sizes"] = ev.read_sizes;
  e["digests"] = ev.digests;
  e["distinct_digests"] = ev.distinct_digests;
  if (ev.mean) {
    e["window_count"] = ev.window_count;
    e["mean"] = *ev.mean;
    e["std"] = *ev.std;
    e["low_fraction"] = *ev.low_fraction;
    e["high_fraction"] = *ev.high_fraction;
  }
  auto sigs = nlohmann::ordered_json::array();
  for (const auto& [off, fmt] : ev.signatures) {
    sigs.push_back({{"offset", off}, {"offset_hex", hex(off)}, {"format", to_string(fmt)}});
  }
  e["signatures"] = std::move(sigs);
  e["notes"] = ev.notes;
  j["evidence"] = std::move(e);
  return j.dump();
}

std::string verdict_to_text(const ValidationVerdict& v) {
  const auto& ev = v.evidence;
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "tier1 size        : %-18s (%llu of %llu bytes)\n",
                std::string(to_string(v.tier1)).c_str(),
                static_cast<unsigned long long>(ev.observed_size),
                static_cast<unsigned long long>(ev.declared_capacity));
  out += line;
  std::snprintf(line, sizeof line, "tier2 consistency : %-18s (%zu reads, %zu distinct digests)\n",
                std::string(to_string(v.tier2)).c_str(), ev.digests.size(), ev.distinct_digests);
  out += line;
  if (ev.mean) {
    std::snprintf(line, sizeof line,
                  "tier3 content     : %-18s (%s; mean %.3f b/B, low %.1f%%, high %.1f%%, "
                  "%zu signatures)\n",
                  std::string(to_string(v.tier3)).c_str(),
                  std::string(to_string(v.layout_character)).c_str(), *ev.mean,
                  100.0 * *ev.low_fraction, 100.0 * *ev.high_fraction, ev.signatures.size());
  } else {
    std::snprintf(line, sizeof line, "tier3 content     : %-18s (%s)\n",
                  std::string(to_string(v.tier3)).c_str(),
                  std::string(to_string(v.layout_character)).c_str());
  }
  out += line;
  out += "overall           : " + std::string(to_string(v.overall)) + " [" + v.summary() + "]\n";
  for (const auto& note : ev.notes) out += "note: " + note + "\n";
  return out;
}

RegionMap layout_map(const EntropyProfile& profile, const ScanResult& scan) {
  require_same_source(profile, scan);
  RegionMap map;
  map.window_size = profile.window_size;
  for (std::size_t i = 0; i < profile.window_count(); ++i) {
    const Band band = profile.band_at(i);
    const std::uint64_t start = profile.window_offsets[i];
    if (!map.regions.empty() && map.regions.back().band == band) {
      map.regions.back().end = start + profile.window_size;
    } else {
      map.regions.push_back(Region{start, start + profile.window_size, band, {}});
    }
  }
  // Hits are offset-sorted, so one forward pass attaches them.
  std::size_t r = 0;
  for (const auto& h : scan.hits) {
    while (r < map.regions.size() && map.regions[r].end <= h.offset) ++r;
    if (r == map.regions.size()) break;
    if (h.offset < map.regions[r].start) continue;
    auto& labels = map.regions[r].labels;
    if (std::find(labels.begin(), labels.end(), h.format) == labels.end()) {
      labels.insert(std::upper_bound(labels.begin(), labels.end(), h.format), h.format);
    }
  }
  return map;
}

std::string region_map_to_json(const RegionMap& map) {
  nlohmann::ordered_json j;
  j["window_size"] = map.window_size;
  auto regions = nlohmann::ordered_json::array();
  for (const auto& r : map.regions) {
    nlohmann::ordered_json o;
    o["start"] = r.start;
    o["end"] = r.end;
    o["start_hex"] = hex(r.start);
    o["end_hex"] = hex(r.end);
    o["band"] = to_string(r.band);
    auto labels = nlohmann::ordered_json::array();
    for (const auto f : r.labels) labels.push_back(to_string(f));
    o["labels"] = std::move(labels);
    regions.push_back(std::move(o));
  }
  j["regions"] = std::move(regions);
  return j.dump();
}

std::string render_region_bar(const EntropyProfile& profile, std::size_t windows_per_char) {
  if (windows_per_char == 0) throw std::invalid_argument("windows per character must be positive");
  std::string bar;
  for (std::size_t i = 0; i < profile.window_count(); i += windows_per_char) {
    std::array<std::size_t, 3> counts{};
    const std::size_t end = std::min(profile.window_count(), i + windows_per_char);
    for (std::size_t k = i; k < end; ++k) ++counts[static_cast<std::size_t>(profile.band_at(k))];
    // Ties go to the higher band so isolated content stays visible.
    std::size_t best = 0;
    for (std::size_t b = 1; b < 3; ++b) {
      if (counts[b] >= counts[best]) best = b;
    }
    bar.push_back(".-#"[best]);
  }
  return bar;
}

}  // namespace fwtriage
