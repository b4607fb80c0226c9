#include "fwtriage/entropy.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <stdexcept>
#include <string>

#include "fwtriage/errors.hpp"
#include "fwtriage/image.hpp"

namespace fwtriage {

double window_entropy(std::span<const std::uint8_t> window) {
  if (window.empty()) throw std::invalid_argument("entropy of an empty window is undefined");

  std::array<std::uint32_t, 256> counts{};
  for (const auto b : window) ++counts[b];

  // H = log2(n) - (1/n) * sum(c * log2(c)); exact for power-of-two windows
  // at the uniform, two-symbol and single-symbol limits.
  double weighted = 0.0;
  int distinct = 0;
  for (const auto c : counts) {
    if (c == 0) continue;
    ++distinct;
    const double cd = static_cast<double>(c);
    weighted += cd * std::log2(cd);
  }
  if (distinct == 1) return 0.0;
  const double n = static_cast<double>(window.size());
  const double h = std::log2(n) - weighted / n;
  if (h < 0.0) return 0.0;
  if (h > 8.0) return 8.0;
  return h;
}

std::string_view to_string(Band b) {
  switch (b) {
    case Band::low: return "LOW";
    case Band::mid: return "MID";
    case Band::high: return "HIGH";
  }
  return "?";
}

Band classify(double entropy, double low_threshold, double high_threshold) {
  if (entropy < low_threshold) return Band::low;
  if (entropy > high_threshold) return Band::high;
  return Band::mid;
}

EntropyProfile summarize_windows(std::vector<double> window_entropies, const ProfileOptions& opts) {
  if (opts.window_size == 0) throw std::invalid_argument("window size must be positive");
  if (opts.low_threshold > opts.high_threshold) {
    throw std::invalid_argument("low threshold exceeds high threshold");
  }
  EntropyProfile p;
  p.window_size = opts.window_size;
  p.low_threshold = opts.low_threshold;
  p.high_threshold = opts.high_threshold;
  p.window_entropies = std::move(window_entropies);
  const std::size_t count = p.window_entropies.size();
  p.window_offsets.resize(count);
  for (std::size_t i = 0; i < count; ++i) p.window_offsets[i] = i * opts.window_size;
  if (count == 0) return p;

  // Shifted by the first window so a run of identical windows gives that
  // window's entropy and a zero deviation exactly.
  const double pivot = p.window_entropies.front();
  double shifted = 0.0;
  std::size_t low = 0, high = 0;
  for (const double h : p.window_entropies) {
    shifted += h - pivot;
    switch (classify(h, opts.low_threshold, opts.high_threshold)) {
      case Band::low: ++low; break;
      case Band::high: ++high; break;
      case Band::mid: break;
    }
  }
  const double n = static_cast<double>(count);
  p.mean = pivot + shifted / n;
  double sq = 0.0;
  for (const double h : p.window_entropies) sq += (h - p.mean) * (h - p.mean);
  p.std = std::sqrt(sq / n);
  p.low_fraction = static_cast<double>(low) / n;
  p.high_fraction = static_cast<double>(high) / n;
  return p;
}

EntropyProfile profile(const FirmwareImage& image, const ProfileOptions& opts) {
  if (opts.window_size == 0) throw std::invalid_argument("window size must be positive");
  const auto bytes = image.bytes();
  if (bytes.size() < opts.window_size) {
    throw insufficient_data_error("image of " + std::to_string(bytes.size()) +
                                  " bytes is shorter than one " +
                                  std::to_string(opts.window_size) + "-byte window");
  }
  const std::size_t count = bytes.size() / opts.window_size;
  std::vector<double> entropies(count);
  for (std::size_t i = 0; i < count; ++i) {
    entropies[i] = window_entropy(bytes.subspan(i * opts.window_size, opts.window_size));
  }
  EntropyProfile p = summarize_windows(std::move(entropies), opts);
  p.dropped_bytes = bytes.size() - count * opts.window_size;
  p.source_digest = image.digest();
  p.source_length = bytes.size();
  return p;
}

std::string emit_profile(const EntropyProfile& p, ProfileFormat format) {
  if (format == ProfileFormat::csv) {
    std::string out = "offset,entropy_bits_per_byte\n";
    char line[64];
    for (std::size_t i = 0; i < p.window_count(); ++i) {
      std::snprintf(line, sizeof line, "%llu,%.6f\n",
                    static_cast<unsigned long long>(p.window_offsets[i]), p.window_entropies[i]);
      out += line;
    }
    return out;
  }
  nlohmann::ordered_json j;
  j["window_size"] = p.window_size;
  j["window_count"] = p.window_count();
  j["mean"] = p.mean;
  j["std"] = p.std;
  j["low_threshold"] = p.low_threshold;
  j["high_threshold"] = p.high_threshold;
  j["low_fraction"] = p.low_fraction;
  j["high_fraction"] = p.high_fraction;
  j["dropped_bytes"] = p.dropped_bytes;
  j["source_digest"] = p.source_digest.hex();
  j["source_length"] = p.source_length;
  j["window_offsets"] = p.window_offsets;
  j["window_entropies"] = p.window_entropies;
  return j.dump() + "\n";
}

EntropyProfile parse_profile_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EntropyProfile p;
    p.window_size = j.at("window_size").get<std::size_t>();
    p.mean = j.at("mean").get<double>();
    p.std = j.at("std").get<double>();
    p.low_threshold = j.at("low_threshold").get<double>();
    p.high_threshold = j.at("high_threshold").get<double>();
    p.low_fraction = j.at("low_fraction").get<double>();
    p.high_fraction = j.at("high_fraction").get<double>();
    p.dropped_bytes = j.at("dropped_bytes").get<std::uint64_t>();
    p.source_digest = Digest::from_hex(j.at("source_digest").get<std::string>());
    p.source_length = j.at("source_length").get<std::uint64_t>();
    p.window_offsets = j.at("window_offsets").get<std::vector<std::uint64_t>>();
    p.window_entropies = j.at("window_entropies").get<std::vector<double>>();
    if (p.window_offsets.size() != p.window_entropies.size()) {
      throw std::invalid_argument("window_offsets and window_entropies differ in length");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed profile JSON: ") + e.what());
  }
}

}  // namespace fwtriage
