#pragma once

// Byte-level header parsers behind the signature scanner.

#include <cstdint>
#include <span>
#include <string>

#include "fwtriage/signatures.hpp"

namespace fwtriage::detail {

enum class ParseStatus { ok, truncated, malformed };

struct ParseOutcome {
  ParseStatus status = ParseStatus::malformed;
  std::string message;
  HeaderFields fields;
  std::string description;
  FormatClass format_class = FormatClass::compressed_data;
};

/// Validates and decodes the structure starting at `offset`.
ParseOutcome parse_structure(ValidatorRule rule, std::span<const std::uint8_t> data,
                             std::uint64_t offset, const ScanOptions& options);

inline std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
inline std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
inline std::uint64_t le64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(le32(p)) | static_cast<std::uint64_t>(le32(p + 4)) << 32;
}
inline std::uint32_t be32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
         static_cast<std::uint32_t>(p[2]) << 8 | static_cast<std::uint32_t>(p[3]);
}

/// CRC-32 as used by uImage and gzip (reflected, pre- and post-inverted).
std::uint32_t crc32_ieee(std::span<const std::uint8_t> data);
/// CRC-32 as used by JFFS2 node headers: same polynomial, zero seed, no final inversion.
std::uint32_t crc32_jffs2(std::span<const std::uint8_t> data);

/// 1234567 -> "1,234,567"
std::string with_commas(std::uint64_t v);

}  // namespace fwtriage::detail
