#include "fwtriage/signatures.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <json.hpp>
#include <stdexcept>

#include "formats.hpp"
#include "fwtriage/errors.hpp"
#include "fwtriage/image.hpp"

namespace fwtriage {

namespace {

constexpr std::array<std::pair<Format, std::string_view>, 10> format_names{{
    {Format::fdt, "FDT"},
    {Format::gzip, "GZIP"},
    {Format::uimage, "UIMAGE"},
    {Format::android_bootimg, "ANDROID_BOOTIMG"},
    {Format::arm_zimage, "ARM_ZIMAGE"},
    {Format::squashfs, "SQUASHFS"},
    {Format::jffs2_node, "JFFS2_NODE"},
    {Format::zlib, "ZLIB"},
    {Format::lzma, "LZMA"},
    {Format::bmp, "BMP"},
}};

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

std::string hex_offset(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(v));
  return buf;
}

bool hit_less(const SignatureHit& a, const SignatureHit& b) {
  return a.offset != b.offset ? a.offset < b.offset : a.format < b.format;
}

}  // namespace

std::string_view to_string(Format f) {
  for (const auto& [value, text] : format_names) {
    if (value == f) return text;
  }
  return "?";
}

std::string_view to_string(FormatClass c) {
  switch (c) {
    case FormatClass::bootloader_stage: return "BOOTLOADER_STAGE";
    case FormatClass::kernel: return "KERNEL";
    case FormatClass::filesystem: return "FILESYSTEM";
    case FormatClass::compressed_data: return "COMPRESSED_DATA";
    case FormatClass::resource: return "RESOURCE";
  }
  return "?";
}

Format parse_format(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& [value, text] : format_names) {
    if (text == upper) return value;
  }
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

FormatClass default_class(Format f) {
  switch (f) {
    case Format::fdt: return FormatClass::bootloader_stage;
    case Format::uimage:
    case Format::android_bootimg:
    case Format::arm_zimage: return FormatClass::kernel;
    case Format::squashfs:
    case Format::jffs2_node: return FormatClass::filesystem;
    case Format::gzip:
    case Format::zlib:
    case Format::lzma: return FormatClass::compressed_data;
    case Format::bmp: return FormatClass::resource;
  }
  return FormatClass::compressed_data;
}

SignatureCatalog::SignatureCatalog(std::vector<CatalogEntry> entries, ScanOptions options)
    : entries_(std::move(entries)), options_(options) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].magic.empty()) throw std::invalid_argument("catalog entry with empty magic");
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[i] == entries_[j]) throw std::invalid_argument("duplicate catalog entry");
    }
  }
}

SignatureCatalog SignatureCatalog::standard(ScanOptions options) {
  using R = ValidatorRule;
  return SignatureCatalog(
      {
          {Format::fdt, {0xD0, 0x0D, 0xFE, 0xED}, 0, 40, R::fdt_header},
          {Format::gzip, {0x1F, 0x8B, 0x08}, 0, 10, R::gzip_member},
          {Format::uimage, {0x27, 0x05, 0x19, 0x56}, 0, 64, R::uimage_header_crc},
          {Format::android_bootimg, bytes_of("ANDROID!"), 0, 1632, R::bootimg_header},
          {Format::arm_zimage, {0x18, 0x28, 0x6F, 0x01}, 0x24, 0x30, R::zimage_le},
          {Format::arm_zimage, {0x01, 0x6F, 0x28, 0x18}, 0x24, 0x30, R::zimage_be},
          {Format::squashfs, bytes_of("hsqs"), 0, 96, R::squashfs_v4},
          {Format::jffs2_node, {0x85, 0x19}, 0, 12, R::jffs2_node},
          {Format::zlib, {0x78}, 0, 2, R::zlib_stream},
          {Format::lzma, {0x5D}, 0, 13, R::lzma_alone},
          {Format::bmp, {'B', 'M'}, 0, 26, R::bmp_dib},
      },
      options);
}

std::optional<SignatureHit> probe(std::span<const std::uint8_t> data, std::uint64_t offset,
                                  const CatalogEntry& entry, const ScanOptions& options) {
  if (offset >= data.size() || data.size() - offset < entry.min_header) return std::nullopt;
  auto parsed = detail::parse_structure(entry.rule, data, offset, options);
  if (parsed.status != detail::ParseStatus::ok) return std::nullopt;
  return SignatureHit{offset, entry.format, parsed.format_class, std::move(parsed.fields),
                      std::move(parsed.description)};
}

ScanResult scan(const FirmwareImage& image) {
  static const SignatureCatalog catalog = SignatureCatalog::standard();
  return scan(image, catalog);
}

ScanResult scan(const FirmwareImage& image, const SignatureCatalog& catalog) {
  ScanResult result;
  result.source_digest = image.digest();
  result.source_length = image.size();

  const auto data = image.bytes();
  const auto& entries = catalog.entries();
  std::array<std::vector<std::size_t>, 256> by_lead;
  for (std::size_t e = 0; e < entries.size(); ++e) by_lead[entries[e].magic[0]].push_back(e);

  const std::uint8_t* base = data.data();
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& candidates = by_lead[base[i]];
    if (candidates.empty()) continue;
    for (const std::size_t e : candidates) {
      const auto& entry = entries[e];
      if (i < entry.anchor || n - i < entry.magic.size()) continue;
      if (std::memcmp(base + i + 1, entry.magic.data() + 1, entry.magic.size() - 1) != 0) continue;
      if (auto hit = probe(data, i - entry.anchor, entry, catalog.options())) {
        result.hits.push_back(std::move(*hit));
      }
    }
  }
  std::sort(result.hits.begin(), result.hits.end(), hit_less);
  result.hits.erase(std::unique(result.hits.begin(), result.hits.end(),
                                [](const SignatureHit& a, const SignatureHit& b) {
                                  return a.offset == b.offset && a.format == b.format;
                                }),
                    result.hits.end());
  return result;
}

HeaderFields parse_header(Format format, const FirmwareImage& image, std::uint64_t offset,
                          const ScanOptions& options) {
  const auto data = image.bytes();
  static const SignatureCatalog catalog = SignatureCatalog::standard();
  const CatalogEntry* chosen = nullptr;
  bool any = false;
  for (const auto& entry : catalog.entries()) {
    if (entry.format != format) continue;
    any = true;
    const std::uint64_t at = offset + entry.anchor;
    if (at <= data.size() && data.size() - at >= entry.magic.size() &&
        std::equal(entry.magic.begin(), entry.magic.end(), data.begin() + at)) {
      chosen = &entry;
      break;
    }
  }
  if (!any) throw std::invalid_argument("format has no catalog entry");
  if (offset >= data.size()) {
    throw truncated_header_error(std::string(to_string(format)) + " header at " +
                                 hex_offset(offset) + " lies past end of image");
  }
  if (chosen == nullptr) {
    // Too short to even hold the magic counts as truncation.
    for (const auto& entry : catalog.entries()) {
      if (entry.format == format && data.size() - offset < entry.anchor + entry.magic.size()) {
        throw truncated_header_error(std::string(to_string(format)) + " header at " +
                                     hex_offset(offset) + " runs past end of image");
      }
    }
    throw malformed_header_error("no " + std::string(to_string(format)) + " magic at " +
                                 hex_offset(offset));
  }
  auto parsed = detail::parse_structure(chosen->rule, data, offset, options);
  const std::string where = std::string(to_string(format)) + " at " + hex_offset(offset) + ": ";
  switch (parsed.status) {
    case detail::ParseStatus::ok: return std::move(parsed.fields);
    case detail::ParseStatus::truncated: throw truncated_header_error(where + parsed.message);
    case detail::ParseStatus::malformed: break;
  }
  throw malformed_header_error(where + parsed.message);
}

SignatureMap signature_map(std::span<const SignatureHit> hits) {
  SignatureMap map;
  map.reserve(hits.size());
  for (const auto& h : hits) map.emplace_back(h.offset, h.format);
  return map;
}

namespace {

nlohmann::ordered_json hit_json(const SignatureHit& hit) {
  nlohmann::ordered_json j;
  j["offset"] = hit.offset;
  j["offset_hex"] = hex_offset(hit.offset);
  j["format"] = to_string(hit.format);
  j["class"] = to_string(hit.format_class);
  nlohmann::ordered_json fields = nlohmann::ordered_json::object();
  for (const auto& [key, value] : hit.fields) {
    std::visit([&](const auto& v) { fields[key] = v; }, value);
  }
  j["fields"] = std::move(fields);
  j["description"] = hit.description;
  return j;
}

}  // namespace

std::string hit_to_json(const SignatureHit& hit) { return hit_json(hit).dump(); }

std::string hits_to_jsonl(std::span<const SignatureHit> hits) {
  std::string out;
  for (const auto& h : hits) out += hit_to_json(h) + "\n";
  return out;
}

std::string hits_to_table(std::span<const SignatureHit> hits) {
  std::string out = "OFFSET      DESCRIPTION                                                CLASS\n";
  for (const auto& h : hits) {
    char line[512];
    std::snprintf(line, sizeof line, "%-11s %-58s %s\n", hex_offset(h.offset).c_str(),
                  h.description.c_str(), std::string(to_string(h.format_class)).c_str());
    out += line;
  }
  return out;
}

}  // namespace fwtriage
