#include "fwtriage/consistency.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "fwtriage/image.hpp"

namespace fwtriage {

std::optional<std::uint64_t> first_divergence(const FirmwareImage& a, const FirmwareImage& b) {
  const auto x = a.bytes();
  const auto y = b.bytes();
  const std::size_t common = std::min(x.size(), y.size());
  const auto [ix, iy] = std::mismatch(x.begin(), x.begin() + common, y.begin());
  const auto at = static_cast<std::uint64_t>(ix - x.begin());
  if (at < common) return at;
  if (x.size() != y.size()) return common;
  return std::nullopt;
}

std::vector<SignatureDelta> diff_signature_maps(const SignatureMap& a, const SignatureMap& b) {
  std::vector<SignatureDelta> deltas;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      deltas.push_back({a[i].first, a[i].second, Side::a});
      ++i;
    } else if (i == a.size() || b[j] < a[i]) {
      deltas.push_back({b[j].first, b[j].second, Side::b});
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return deltas;
}

ConsistencyReport compare(const FirmwareImage& a, const FirmwareImage& b) {
  static const SignatureCatalog catalog = SignatureCatalog::standard();
  return compare(a, b, catalog);
}

ConsistencyReport compare(const FirmwareImage& a, const FirmwareImage& b,
                          const SignatureCatalog& catalog) {
  ConsistencyReport r;
  r.digest_equal = a.digest() == b.digest();
  if (r.digest_equal) {
    r.signature_map_equal = true;
    return r;
  }
  r.first_divergence = first_divergence(a, b);
  const auto map_a = signature_map(scan(a, catalog).hits);
  const auto map_b = signature_map(scan(b, catalog).hits);
  r.signature_deltas = diff_signature_maps(map_a, map_b);
  r.signature_map_equal = r.signature_deltas.empty();
  return r;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string report_to_json(const ConsistencyReport& r) {
  nlohmann::ordered_json j;
  j["digest_equal"] = r.digest_equal;
  if (r.first_divergence) {
    j["first_divergence"] = *r.first_divergence;
    j["first_divergence_hex"] = hex(*r.first_divergence);
  } else {
    j["first_divergence"] = nullptr;
  }
  j["signature_map_equal"] = r.signature_map_equal;
  auto deltas = nlohmann::ordered_json::array();
  for (const auto& d : r.signature_deltas) {
    deltas.push_back({{"offset", d.offset},
                      {"offset_hex", hex(d.offset)},
                      {"format", to_string(d.format)},
                      {"present_in", d.present_in == Side::a ? "A" : "B"}});
  }
  j["signature_deltas"] = std::move(deltas);
  j["summary"] = report_summary(r);
  return j.dump();
}

std::string report_summary(const ConsistencyReport& r) {
  if (r.digest_equal) return "CONSISTENT";
  return "DIVERGES AT " + hex(r.first_divergence.value_or(0));
}

}  // namespace fwtriage
