#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fwtriage/digest.hpp"

namespace fwtriage {

class FirmwareImage;

// Declaration order is the tie-break order for hits sharing an offset.
enum class Format {
  fdt,
  gzip,
  uimage,
  android_bootimg,
  arm_zimage,
  squashfs,
  jffs2_node,
  zlib,
  lzma,
  bmp,
};

enum class FormatClass { bootloader_stage, kernel, filesystem, compressed_data, resource };

std::string_view to_string(Format f);
std::string_view to_string(FormatClass c);
Format parse_format(std::string_view name);

/// Class implied by the format alone. GZIP defaults to compressed data; a
/// gzip member named like a bootloader stage is reclassified by the scanner.
FormatClass default_class(Format f);

using FieldValue = std::variant<std::uint64_t, std::string>;
using HeaderFields = std::map<std::string, FieldValue>;

struct SignatureHit {
  std::uint64_t offset = 0;
  Format format = Format::fdt;
  FormatClass format_class = FormatClass::bootloader_stage;
  HeaderFields fields;
  std::string description;

  friend bool operator==(const SignatureHit&, const SignatureHit&) = default;
};

/// Header checks applied after a magic match.
enum class ValidatorRule {
  fdt_header,
  gzip_member,
  uimage_header_crc,
  bootimg_header,
  zimage_le,
  zimage_be,
  squashfs_v4,
  jffs2_node,
  zlib_stream,
  lzma_alone,
  bmp_dib,
};

struct CatalogEntry {
  Format format;
  std::vector<std::uint8_t> magic;
  std::size_t anchor = 0;  // magic position relative to the structure start
  std::size_t min_header = 0;
  ValidatorRule rule;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

struct ScanOptions {
  bool jffs2_verify_crc = true;
};

class SignatureCatalog {
 public:
  /// Throws std::invalid_argument on empty magic or duplicate entries.
  explicit SignatureCatalog(std::vector<CatalogEntry> entries, ScanOptions options = {});

  /// Every format the scanner knows about.
  static SignatureCatalog standard(ScanOptions options = {});

  const std::vector<CatalogEntry>& entries() const { return entries_; }
  const ScanOptions& options() const { return options_; }

 private:
  std::vector<CatalogEntry> entries_;
  ScanOptions options_;
};

/// Hits for one image, ordered by (offset, format), tagged with the image
/// they came from.
struct ScanResult {
  Digest source_digest;
  std::uint64_t source_length = 0;
  std::vector<SignatureHit> hits;
};

ScanResult scan(const FirmwareImage& image);
ScanResult scan(const FirmwareImage& image, const SignatureCatalog& catalog);

/// Applies one catalog entry's validator at a structure offset. The magic is
/// assumed to be present; returns nullopt if the header does not validate.
std::optional<SignatureHit> probe(std::span<const std::uint8_t> data, std::uint64_t offset,
                                  const CatalogEntry& entry, const ScanOptions& options = {});

/// Format-specific fields for a header at `offset`. Throws
/// truncated_header_error or malformed_header_error.
HeaderFields parse_header(Format format, const FirmwareImage& image, std::uint64_t offset,
                          const ScanOptions& options = {});

using SignatureMap = std::vector<std::pair<std::uint64_t, Format>>;

SignatureMap signature_map(std::span<const SignatureHit> hits);

/// {"offset":..,"offset_hex":"0x..","format":..,"class":..,"fields":{..},"description":..}
std::string hit_to_json(const SignatureHit& hit);
std::string hits_to_jsonl(std::span<const SignatureHit> hits);
/// Aligned text rows: offset, description, class.
std::string hits_to_table(std::span<const SignatureHit> hits);

}  // namespace fwtriage
