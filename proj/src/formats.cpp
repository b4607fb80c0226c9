#include "formats.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cstring>
#include <string_view>

#include "fwtriage/timestamp.hpp"

namespace fwtriage::detail {

namespace {

ParseOutcome truncated(std::string msg) {
  ParseOutcome r;
  r.status = ParseStatus::truncated;
  r.message = std::move(msg);
  return r;
}

ParseOutcome malformed(std::string msg) {
  ParseOutcome r;
  r.status = ParseStatus::malformed;
  r.message = std::move(msg);
  return r;
}

std::string date_of(std::uint32_t unix_seconds) {
  return format_date(Timestamp{std::chrono::seconds{unix_seconds}});
}

std::string iso_of(std::uint32_t unix_seconds) {
  return format_iso8601(Timestamp{std::chrono::seconds{unix_seconds}});
}

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// Weak magics are rejected when the bytes that follow are a constant fill.
bool constant_fill(const std::uint8_t* p, std::size_t n) {
  return std::all_of(p, p + n, [first = p[0]](std::uint8_t b) { return b == first; });
}

constexpr std::size_t weak_magic_window = 16;

std::string fixed_string(const std::uint8_t* p, std::size_t max) {
  std::size_t len = 0;
  while (len < max && p[len] != 0) ++len;
  return std::string(reinterpret_cast<const char*>(p), len);
}

bool printable(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= 0x20 && c < 0x7F; });
}

// -- FDT --------------------------------------------------------------------

ParseOutcome parse_fdt(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 40) return truncated("FDT header needs 40 bytes");
  const auto* p = data.data() + off;
  if (be32(p) != 0xD00DFEEDu) return malformed("FDT magic mismatch");
  const std::uint32_t total = be32(p + 4);
  const std::uint32_t off_struct = be32(p + 8);
  const std::uint32_t off_strings = be32(p + 12);
  const std::uint32_t off_rsvmap = be32(p + 16);
  const std::uint32_t version = be32(p + 20);
  const std::uint32_t last_comp = be32(p + 24);
  const std::uint32_t boot_cpu = be32(p + 28);
  const std::uint32_t size_strings = be32(p + 32);
  const std::uint32_t size_struct = be32(p + 36);

  if (version < 16 || version > 17) return malformed("unsupported FDT version");
  if (last_comp > version) return malformed("FDT last_comp_version exceeds version");
  if (total < 40) return malformed("FDT total size smaller than its header");
  if (off_rsvmap < 40 || off_rsvmap >= total) return malformed("FDT reserve map outside blob");
  if (off_struct < 40 || std::uint64_t{off_struct} + size_struct > total) {
    return malformed("FDT structure block outside blob");
  }
  if (off_strings < 40 || std::uint64_t{off_strings} + size_strings > total) {
    return malformed("FDT strings block outside blob");
  }
  if (total > avail) return truncated("FDT blob extends past end of image");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["total_size"] = std::uint64_t{total};
  r.fields["version"] = std::uint64_t{version};
  r.fields["last_comp_version"] = std::uint64_t{last_comp};
  r.fields["boot_cpuid_phys"] = std::uint64_t{boot_cpu};
  r.fields["size_dt_struct"] = std::uint64_t{size_struct};
  r.fields["size_dt_strings"] = std::uint64_t{size_strings};
  r.description =
      "Flattened Device Tree (" + with_commas(total) + " bytes, v" + std::to_string(version) + ")";
  r.format_class = FormatClass::bootloader_stage;
  return r;
}

// -- gzip -------------------------------------------------------------------

bool bootloader_stage_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name.starts_with("u-boot") || name.starts_with("tee");
}

ParseOutcome parse_gzip(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 10) return truncated("gzip header needs 10 bytes");
  const auto* p = data.data() + off;
  if (p[0] != 0x1F || p[1] != 0x8B || p[2] != 0x08) return malformed("gzip magic mismatch");
  const std::uint8_t flags = p[3];
  const std::uint32_t mtime = le32(p + 4);
  const std::uint8_t xfl = p[8];
  const std::uint8_t os = p[9];
  if (flags & 0xE0) return malformed("gzip reserved flag bits set");
  if (xfl != 0 && xfl != 2 && xfl != 4) return malformed("gzip extra flags invalid");
  if (os > 13 && os != 255) return malformed("gzip OS byte invalid");

  std::uint64_t pos = 10;
  if (flags & 0x04) {
    if (pos + 2 > avail) return truncated("gzip FEXTRA length past end");
    pos += 2 + le16(p + pos);
  }
  std::string name;
  auto read_zstring = [&](std::size_t limit, std::string& out) -> int {
    const std::uint64_t start = pos;
    while (pos < avail && pos - start <= limit && p[pos] != 0) ++pos;
    if (pos >= avail) return -1;
    if (pos - start > limit) return 1;
    out.assign(reinterpret_cast<const char*>(p + start), pos - start);
    ++pos;
    return printable(out) ? 0 : 1;
  };
  if (flags & 0x08) {
    const int rc = read_zstring(255, name);
    if (rc < 0) return truncated("gzip file name runs past end");
    if (rc > 0 || name.empty()) return malformed("gzip file name not printable");
  }
  if (flags & 0x10) {
    std::string comment;
    const int rc = read_zstring(1023, comment);
    if (rc < 0) return truncated("gzip comment runs past end");
    if (rc > 0) return malformed("gzip comment not printable");
  }
  if (flags & 0x02) pos += 2;
  if (pos + weak_magic_window > avail) return truncated("gzip member shorter than its header");
  if (constant_fill(p + pos, weak_magic_window)) return malformed("gzip payload is constant fill");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["flags"] = std::uint64_t{flags};
  r.fields["mtime"] = std::uint64_t{mtime};
  r.fields["mtime_iso"] = iso_of(mtime);
  r.fields["extra_flags"] = std::uint64_t{xfl};
  r.fields["os"] = std::uint64_t{os};
  r.fields["header_size"] = pos;
  if (!name.empty()) r.fields["original_name"] = name;
  const std::string when = mtime != 0 ? " (" + date_of(mtime) + ")" : "";
  r.description = name.empty() ? "gzip compressed data" + when : "gzip: " + name + when;
  r.format_class = !name.empty() && bootloader_stage_name(name) ? FormatClass::bootloader_stage
                                                                 : FormatClass::compressed_data;
  return r;
}

// -- uImage -----------------------------------------------------------------

std::string uimage_os(std::uint8_t v) {
  switch (v) {
    case 1: return "OpenBSD";
    case 2: return "NetBSD";
    case 3: return "FreeBSD";
    case 5: return "Linux";
    case 17: return "U-Boot";
    case 18: return "QNX";
    case 20: return "RTEMS";
    default: return "os-" + std::to_string(v);
  }
}

std::string uimage_arch(std::uint8_t v) {
  switch (v) {
    case 1: return "Alpha";
    case 2: return "ARM";
    case 3: return "x86";
    case 5: return "MIPS";
    case 6: return "MIPS64";
    case 7: return "PowerPC";
    case 8: return "S390";
    case 15: return "Sandbox";
    case 22: return "ARM64";
    case 26: return "RISC-V";
    default: return "arch-" + std::to_string(v);
  }
}

std::string uimage_type(std::uint8_t v) {
  switch (v) {
    case 1: return "standalone";
    case 2: return "kernel";
    case 3: return "ramdisk";
    case 4: return "multi";
    case 5: return "firmware";
    case 6: return "script";
    case 7: return "filesystem";
    case 8: return "flat_dt";
    default: return "type-" + std::to_string(v);
  }
}

std::string uimage_compression(std::uint8_t v) {
  static constexpr std::array<std::string_view, 7> names{"none", "gzip", "bzip2", "lzma",
                                                         "lzo",  "lz4",  "zstd"};
  return v < names.size() ? std::string(names[v]) : "comp-" + std::to_string(v);
}

ParseOutcome parse_uimage(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 64) return truncated("uImage header needs 64 bytes");
  const auto* p = data.data() + off;
  if (be32(p) != 0x27051956u) return malformed("uImage magic mismatch");
  std::array<std::uint8_t, 64> hdr{};
  std::memcpy(hdr.data(), p, 64);
  const std::uint32_t stored_crc = be32(p + 4);
  std::memset(hdr.data() + 4, 0, 4);
  if (crc32_ieee(hdr) != stored_crc) return malformed("uImage header CRC mismatch");
  const std::uint32_t time = be32(p + 8);
  const std::uint32_t size = be32(p + 12);
  const std::uint32_t load = be32(p + 16);
  const std::uint32_t entry = be32(p + 20);
  const std::uint32_t dcrc = be32(p + 24);
  const std::string name = fixed_string(p + 32, 32);
  if (std::uint64_t{size} > avail - 64) return truncated("uImage data extends past end of image");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["image_name"] = name;
  r.fields["os"] = uimage_os(p[28]);
  r.fields["architecture"] = uimage_arch(p[29]);
  r.fields["image_type"] = uimage_type(p[30]);
  r.fields["compression"] = uimage_compression(p[31]);
  r.fields["build_timestamp"] = iso_of(time);
  r.fields["data_size"] = std::uint64_t{size};
  r.fields["load_address"] = std::uint64_t{load};
  r.fields["entry_point"] = std::uint64_t{entry};
  r.fields["data_crc"] = std::uint64_t{dcrc};
  r.description = "uImage: " + name + ", " + uimage_arch(p[29]) + " (" + date_of(time) + ")";
  r.format_class = FormatClass::kernel;
  return r;
}

// -- Android boot image -----------------------------------------------------

constexpr std::uint64_t bootimg_v0_header = 1632;

ParseOutcome parse_bootimg(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < bootimg_v0_header) return truncated("Android boot header needs 1632 bytes");
  const auto* p = data.data() + off;
  if (std::memcmp(p, "ANDROID!", 8) != 0) return malformed("Android boot magic mismatch");
  const std::uint32_t kernel_size = le32(p + 8);
  const std::uint32_t ramdisk_size = le32(p + 16);
  const std::uint32_t second_size = le32(p + 24);
  const std::uint32_t page_size = le32(p + 36);
  const std::uint32_t header_version = le32(p + 40);
  const std::string name = fixed_string(p + 48, 16);
  if (!is_power_of_two(page_size) || page_size < 2048 || page_size > 65536) {
    return malformed("Android boot page size invalid");
  }
  if (kernel_size == 0) return malformed("Android boot image without kernel");
  if (header_version > 4) return malformed("Android boot header version unknown");
  if (!printable(name)) return malformed("Android boot board name not printable");
  const auto pages = [&](std::uint64_t n) { return (n + page_size - 1) / page_size * page_size; };
  if (page_size + pages(kernel_size) > avail) {
    return truncated("Android boot kernel extends past end of image");
  }

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["kernel_size"] = std::uint64_t{kernel_size};
  r.fields["ramdisk_size"] = std::uint64_t{ramdisk_size};
  r.fields["second_size"] = std::uint64_t{second_size};
  r.fields["page_size"] = std::uint64_t{page_size};
  r.fields["header_version"] = std::uint64_t{header_version};
  if (!name.empty()) r.fields["board_name"] = name;
  r.description = "Android bootimg; kernel (" + with_commas(kernel_size) + " bytes), page size " +
                  with_commas(page_size);
  r.format_class = FormatClass::kernel;
  return r;
}

// -- ARM zImage -------------------------------------------------------------

ParseOutcome parse_zimage(std::span<const std::uint8_t> data, std::uint64_t off, bool big) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 0x30) return truncated("zImage header needs 48 bytes");
  const auto* p = data.data() + off;
  const auto word = [&](std::size_t at) { return big ? be32(p + at) : le32(p + at); };
  if (word(0x24) != 0x016F2818u) return malformed("zImage magic mismatch");
  const std::uint32_t start = word(0x28);
  const std::uint32_t end = word(0x2C);
  if (end <= start) return malformed("zImage end precedes start");
  if (std::uint64_t{end} - start > avail) return truncated("zImage extends past end of image");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["endianness"] = std::string(big ? "big" : "little");
  r.fields["image_size"] = std::uint64_t{end - start};
  r.description = std::string("ARM zImage (") + (big ? "big" : "little") + "-endian)";
  r.format_class = FormatClass::kernel;
  return r;
}

// -- SquashFS ---------------------------------------------------------------

std::string squashfs_compression(std::uint16_t id) {
  switch (id) {
    case 1: return "gzip";
    case 2: return "lzma";
    case 3: return "lzo";
    case 4: return "xz";
    case 5: return "lz4";
    case 6: return "zstd";
    default: return "unknown";
  }
}

ParseOutcome parse_squashfs(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 96) return truncated("SquashFS superblock needs 96 bytes");
  const auto* p = data.data() + off;
  if (std::memcmp(p, "hsqs", 4) != 0) return malformed("SquashFS magic mismatch");
  const std::uint32_t inodes = le32(p + 4);
  const std::uint32_t mod_time = le32(p + 8);
  const std::uint32_t block_size = le32(p + 12);
  const std::uint16_t compression = le16(p + 20);
  const std::uint16_t block_log = le16(p + 22);
  const std::uint16_t major = le16(p + 28);
  const std::uint16_t minor = le16(p + 30);
  const std::uint64_t bytes_used = le64(p + 40);
  if (major != 4) return malformed("SquashFS major version is not 4");
  if (compression < 1 || compression > 6) return malformed("SquashFS compression id unknown");
  if (!is_power_of_two(block_size) || block_size < 4096 || block_size > (1u << 20) ||
      (1u << block_log) != block_size) {
    return malformed("SquashFS block size inconsistent");
  }
  if (bytes_used < 96) return malformed("SquashFS bytes_used smaller than superblock");
  if (bytes_used > avail) return truncated("SquashFS image extends past end of image");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["version_major"] = std::uint64_t{major};
  r.fields["version_minor"] = std::uint64_t{minor};
  r.fields["compression_id"] = std::uint64_t{compression};
  r.fields["compression"] = squashfs_compression(compression);
  r.fields["bytes_used"] = bytes_used;
  r.fields["inode_count"] = std::uint64_t{inodes};
  r.fields["block_size"] = std::uint64_t{block_size};
  r.fields["mod_time"] = iso_of(mod_time);
  r.description = "SquashFS v" + std::to_string(major) + "." + std::to_string(minor) + ", " +
                  squashfs_compression(compression) + ", " + with_commas(bytes_used) +
                  " bytes, " + with_commas(inodes) + " inodes";
  r.format_class = FormatClass::filesystem;
  return r;
}

// -- JFFS2 ------------------------------------------------------------------

struct Jffs2Type {
  std::uint16_t code;
  std::string_view name;
  std::uint32_t min_length;
};

constexpr std::array<Jffs2Type, 7> jffs2_types{{
    {0xE001, "dirent", 40},
    {0xE002, "inode", 68},
    {0x2003, "cleanmarker", 12},
    {0x2004, "padding", 12},
    {0x2006, "summary", 32},
    {0xE008, "xattr", 32},
    {0xE009, "xref", 24},
}};

constexpr std::uint32_t jffs2_max_node = 1u << 20;

ParseOutcome parse_jffs2(std::span<const std::uint8_t> data, std::uint64_t off,
                         const ScanOptions& options) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 12) return truncated("JFFS2 node header needs 12 bytes");
  const auto* p = data.data() + off;
  if (le16(p) != 0x1985) return malformed("JFFS2 magic mismatch");
  const std::uint16_t type = le16(p + 2);
  const std::uint32_t length = le32(p + 4);
  const auto* known = std::find_if(jffs2_types.begin(), jffs2_types.end(),
                                   [&](const Jffs2Type& t) { return t.code == type; });
  if (known == jffs2_types.end()) return malformed("JFFS2 node type unknown");
  if (options.jffs2_verify_crc && crc32_jffs2({p, 8}) != le32(p + 8)) {
    return malformed("JFFS2 header CRC mismatch");
  }
  if (length < known->min_length || length > jffs2_max_node) {
    return malformed("JFFS2 node length not plausible");
  }
  if (length > avail) return truncated("JFFS2 node extends past end of image");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["node_type"] = std::uint64_t{type};
  r.fields["node_type_name"] = std::string(known->name);
  r.fields["node_length"] = std::uint64_t{length};
  if (type == 0xE002) {
    r.fields["inode"] = std::uint64_t{le32(p + 12)};
    r.fields["compressed_size"] = std::uint64_t{le32(p + 48)};
    r.fields["data_size"] = std::uint64_t{le32(p + 52)};
    r.fields["compression"] = std::uint64_t{p[56]};
  }
  r.description =
      "JFFS2 node (" + std::string(known->name) + ", " + with_commas(length) + " bytes)";
  r.format_class = FormatClass::filesystem;
  return r;
}

// -- zlib -------------------------------------------------------------------

ParseOutcome parse_zlib(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 2 + weak_magic_window) return truncated("zlib stream shorter than 18 bytes");
  const auto* p = data.data() + off;
  const std::uint8_t cmf = p[0];
  const std::uint8_t flg = p[1];
  if ((cmf & 0x0F) != 8 || (cmf >> 4) > 7) return malformed("zlib method is not deflate");
  if ((cmf * 256u + flg) % 31 != 0) return malformed("zlib header check failed");
  if (flg & 0x20) return malformed("zlib preset dictionary not supported");
  if (constant_fill(p + 2, weak_magic_window)) return malformed("zlib payload is constant fill");

  // A header match alone is a 1-in-8000 event on random data; a stream only
  // counts once it inflates cleanly to its end, Adler-32 included.
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) return malformed("zlib inflater unavailable");
  std::array<std::uint8_t, 1 << 15> sink{};
  std::uint64_t consumed = 0;
  int rc = Z_OK;
  while (rc == Z_OK) {
    if (zs.avail_in == 0) {
      const std::uint64_t chunk = std::min<std::uint64_t>(avail - consumed, 1u << 30);
      if (chunk == 0) break;
      zs.next_in = const_cast<Bytef*>(p + consumed);
      zs.avail_in = static_cast<uInt>(chunk);
      consumed += chunk;
    }
    zs.next_out = sink.data();
    zs.avail_out = static_cast<uInt>(sink.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_BUF_ERROR && zs.avail_in == 0 && consumed < avail) rc = Z_OK;
  }
  const std::uint64_t in = zs.total_in;
  const std::uint64_t out = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    if (rc == Z_OK || (rc == Z_BUF_ERROR && consumed == avail)) {
      return truncated("zlib stream runs past end of image");
    }
    return malformed("zlib stream does not inflate");
  }

  static constexpr std::array<std::string_view, 4> levels{"fastest", "fast", "default", "best"};
  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["cmf"] = std::uint64_t{cmf};
  r.fields["flg"] = std::uint64_t{flg};
  r.fields["window_size"] = std::uint64_t{1} << ((cmf >> 4) + 8);
  r.fields["level"] = std::string(levels[flg >> 6]);
  r.fields["compressed_size"] = in;
  r.fields["uncompressed_size"] = out;
  r.description = "Zlib compressed data, " + std::string(levels[flg >> 6]) + " compression, " +
                  with_commas(in) + " bytes";
  r.format_class = FormatClass::compressed_data;
  return r;
}

// -- LZMA (.lzma / lzma_alone) ----------------------------------------------

bool plausible_dictionary(std::uint32_t d) {
  if (d < 4096 || d > (1u << 30)) return false;
  if (is_power_of_two(d)) return true;
  return d % 3 == 0 && is_power_of_two(d / 3);
}

ParseOutcome parse_lzma(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 14 + weak_magic_window) return truncated("LZMA header needs 30 bytes");
  const auto* p = data.data() + off;
  const std::uint8_t props = p[0];
  const std::uint32_t dict = le32(p + 1);
  const std::uint64_t usize = le64(p + 5);
  if (props >= 225) return malformed("LZMA properties byte out of range");
  if (!plausible_dictionary(dict)) return malformed("LZMA dictionary size implausible");
  constexpr std::uint64_t unknown_size = ~0ull;
  if (usize != unknown_size && usize >= (1ull << 36)) {
    return malformed("LZMA uncompressed size implausible");
  }
  // The range decoder's first byte is always zero.
  if (p[13] != 0) return malformed("LZMA stream does not start with a zero byte");
  // Range coder output is dense; erased flash sprinkled with noise is not.
  if (std::count(p + 14, p + 14 + weak_magic_window, 0) > 4) {
    return malformed("LZMA payload is mostly zero bytes");
  }

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["properties"] = std::uint64_t{props};
  r.fields["lc"] = std::uint64_t{props % 9u};
  r.fields["lp"] = std::uint64_t{props / 9u % 5u};
  r.fields["pb"] = std::uint64_t{props / 45u};
  r.fields["dictionary_size"] = std::uint64_t{dict};
  if (usize == unknown_size) {
    r.fields["uncompressed_size"] = std::string("unknown");
  } else {
    r.fields["uncompressed_size"] = usize;
  }
  char hex[8];
  std::snprintf(hex, sizeof hex, "0x%02X", props);
  r.description = std::string("LZMA compressed data, properties ") + hex + ", dictionary " +
                  with_commas(dict) + " bytes, uncompressed size " +
                  (usize == unknown_size ? std::string("unknown") : with_commas(usize) + " bytes");
  r.format_class = FormatClass::compressed_data;
  return r;
}

// -- BMP --------------------------------------------------------------------

ParseOutcome parse_bmp(std::span<const std::uint8_t> data, std::uint64_t off) {
  const std::uint64_t avail = data.size() - off;
  if (avail < 26) return truncated("BMP header needs 26 bytes");
  const auto* p = data.data() + off;
  if (p[0] != 'B' || p[1] != 'M') return malformed("BMP magic mismatch");
  const std::uint32_t file_size = le32(p + 2);
  const std::uint32_t pixel_offset = le32(p + 10);
  const std::uint32_t dib = le32(p + 14);
  if (le16(p + 6) != 0 || le16(p + 8) != 0) return malformed("BMP reserved fields non-zero");
  static constexpr std::array<std::uint32_t, 6> dib_sizes{12, 40, 52, 56, 108, 124};
  if (std::find(dib_sizes.begin(), dib_sizes.end(), dib) == dib_sizes.end()) {
    return malformed("BMP DIB header size unknown");
  }
  if (14 + std::uint64_t{dib} > avail) return truncated("BMP DIB header past end of image");

  std::uint64_t width = 0, height = 0;
  std::uint16_t planes = 0, bpp = 0;
  std::uint32_t compression = 0;
  if (dib == 12) {
    width = le16(p + 18);
    height = le16(p + 20);
    planes = le16(p + 22);
    bpp = le16(p + 24);
  } else {
    const auto w = static_cast<std::int32_t>(le32(p + 18));
    const auto h = static_cast<std::int32_t>(le32(p + 22));
    if (w <= 0 || h == 0 || h == INT32_MIN) return malformed("BMP dimensions invalid");
    width = static_cast<std::uint64_t>(w);
    height = static_cast<std::uint64_t>(h < 0 ? -static_cast<std::int64_t>(h) : h);
    planes = le16(p + 26);
    bpp = le16(p + 28);
    compression = le32(p + 30);
  }
  if (width < 1 || width > 65535 || height < 1 || height > 65535) {
    return malformed("BMP dimensions out of range");
  }
  if (planes != 1) return malformed("BMP plane count is not 1");
  static constexpr std::array<std::uint16_t, 6> depths{1, 4, 8, 16, 24, 32};
  if (std::find(depths.begin(), depths.end(), bpp) == depths.end()) {
    return malformed("BMP bit depth unknown");
  }
  if (compression > 6) return malformed("BMP compression unknown");
  if (pixel_offset < 14 + dib || file_size < pixel_offset) {
    return malformed("BMP pixel data offset inconsistent");
  }
  if (file_size > avail) return truncated("BMP file extends past end of image");

  ParseOutcome r;
  r.status = ParseStatus::ok;
  r.fields["width"] = width;
  r.fields["height"] = height;
  r.fields["bits_per_pixel"] = std::uint64_t{bpp};
  r.fields["file_size"] = std::uint64_t{file_size};
  r.fields["dib_header_size"] = std::uint64_t{dib};
  r.description = "PC bitmap, " + std::to_string(width) + " x " + std::to_string(height) + " x " +
                  std::to_string(bpp);
  r.format_class = FormatClass::resource;
  return r;
}

struct CrcTable {
  std::array<std::uint32_t, 256> t{};
  CrcTable() {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
  }
};

}  // namespace

std::uint32_t crc32_ieee(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

std::uint32_t crc32_jffs2(std::span<const std::uint8_t> data) {
  static const CrcTable table;
  std::uint32_t c = 0;
  for (const auto b : data) c = table.t[(c ^ b) & 0xFF] ^ (c >> 8);
  return c;
}

std::string with_commas(std::uint64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

ParseOutcome parse_structure(ValidatorRule rule, std::span<const std::uint8_t> data,
                             std::uint64_t offset, const ScanOptions& options) {
  if (offset >= data.size()) return truncated("offset past end of image");
  switch (rule) {
    case ValidatorRule::fdt_header: return parse_fdt(data, offset);
    case ValidatorRule::gzip_member: return parse_gzip(data, offset);
    case ValidatorRule::uimage_header_crc: return parse_uimage(data, offset);
    case ValidatorRule::bootimg_header: return parse_bootimg(data, offset);
    case ValidatorRule::zimage_le: return parse_zimage(data, offset, false);
    case ValidatorRule::zimage_be: return parse_zimage(data, offset, true);
    case ValidatorRule::squashfs_v4: return parse_squashfs(data, offset);
    case ValidatorRule::jffs2_node: return parse_jffs2(data, offset, options);
    case ValidatorRule::zlib_stream: return parse_zlib(data, offset);
    case ValidatorRule::lzma_alone: return parse_lzma(data, offset);
    case ValidatorRule::bmp_dib: return parse_bmp(data, offset);
  }
  return malformed("unknown validator rule");
}

}  // namespace fwtriage::detail
