#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fwtriage/signatures.hpp"

namespace fwtriage {

class FirmwareImage;

enum class Side { a, b };

struct SignatureDelta {
  std::uint64_t offset = 0;
  Format format = Format::fdt;
  Side present_in = Side::a;

  friend bool operator==(const SignatureDelta&, const SignatureDelta&) = default;
};

struct ConsistencyReport {
  bool digest_equal = false;
  std::optional<std::uint64_t> first_divergence;
  bool signature_map_equal = false;
  std::vector<SignatureDelta> signature_deltas;

  bool consistent() const { return digest_equal; }
};

/// Lowest differing offset, or the shorter length when one payload is a
/// strict prefix of the other; nullopt for identical payloads.
std::optional<std::uint64_t> first_divergence(const FirmwareImage& a, const FirmwareImage& b);

/// Symmetric difference of two ordered signature maps, in offset order.
std::vector<SignatureDelta> diff_signature_maps(const SignatureMap& a, const SignatureMap& b);

ConsistencyReport compare(const FirmwareImage& a, const FirmwareImage& b);
ConsistencyReport compare(const FirmwareImage& a, const FirmwareImage& b,
                          const SignatureCatalog& catalog);

std::string report_to_json(const ConsistencyReport& r);
/// "CONSISTENT" or "DIVERGES AT 0x...".
std::string report_summary(const ConsistencyReport& r);

}  // namespace fwtriage
