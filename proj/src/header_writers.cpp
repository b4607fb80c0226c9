#include "header_writers.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>

namespace fwtriage::detail {

namespace {

void put_le16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}
void put_le32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_le64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_be32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

void put_string(std::uint8_t* p, std::size_t field, const std::string& s) {
  std::memset(p, 0, field);
  std::memcpy(p, s.data(), std::min(field - 1, s.size()));
}

std::uint32_t zlib_crc(std::span<const std::uint8_t> d) {
  return static_cast<std::uint32_t>(::crc32(0L, d.data(), static_cast<uInt>(d.size())));
}

// JFFS2 runs the CRC-32 register from zero without the final complement,
// which is zlib's CRC with both inversions undone.
std::uint32_t jffs2_crc(std::span<const std::uint8_t> d) {
  return ~static_cast<std::uint32_t>(
      ::crc32(0xFFFFFFFFuL, d.data(), static_cast<uInt>(d.size())));
}

constexpr std::uint64_t fdt_header = 40;
constexpr std::uint64_t fdt_rsvmap = 16;
constexpr std::uint64_t uimage_header = 64;
constexpr std::uint64_t bootimg_header = 1632;
constexpr std::uint64_t zimage_header = 0x34;
constexpr std::uint64_t squashfs_superblock = 96;
constexpr std::uint64_t jffs2_inode_header = 68;
constexpr std::uint64_t lzma_header = 13;
constexpr std::uint64_t stored_block_max = 65535;

std::uint64_t bmp_palette(const BmpSpec& s) {
  return s.bits_per_pixel <= 8 ? (std::uint64_t{1} << s.bits_per_pixel) * 4 : 0;
}
std::uint64_t bmp_row(const BmpSpec& s) {
  return (std::uint64_t{s.width} * s.bits_per_pixel + 31) / 32 * 4;
}

std::uint64_t stored_blocks(std::uint64_t n) {
  std::uint64_t blocks = 1;
  while (n - 6 - 5 * blocks > blocks * stored_block_max) ++blocks;
  return blocks;
}

std::uint64_t stored_payload(std::uint64_t n) { return n - 6 - 5 * stored_blocks(n); }

/// Zlib stream of stored blocks filling `region` exactly; the payload is the
/// bytes currently in the region, shifted to make room for block headers.
void write_stored_zlib(std::span<std::uint8_t> region) {
  const std::uint64_t n = region.size();
  if (n < 12) throw std::invalid_argument("zlib region too small");
  const std::uint64_t blocks = stored_blocks(n);
  const std::uint64_t payload = stored_payload(n);
  const std::vector<std::uint8_t> source(region.begin(), region.begin() + payload);

  std::uint8_t* p = region.data();
  p[0] = 0x78;
  p[1] = 0x01;
  std::uint64_t pos = 2, taken = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t len = std::min(stored_block_max, payload - taken);
    p[pos] = b + 1 == blocks ? 0x01 : 0x00;
    put_le16(p + pos + 1, static_cast<std::uint16_t>(len));
    put_le16(p + pos + 3, static_cast<std::uint16_t>(~len));
    std::memcpy(p + pos + 5, source.data() + taken, len);
    pos += 5 + len;
    taken += len;
  }
  put_be32(p + pos, adler32(source));
}

void write(const std::monostate&, std::span<std::uint8_t>) {}

void write(const FdtSpec& s, std::span<std::uint8_t> r) {
  if (s.total_size < 96) throw std::invalid_argument("FDT too small");
  std::uint8_t* p = r.data();
  const std::uint32_t strings = std::max<std::uint32_t>(4, s.total_size / 8);
  const std::uint32_t off_struct = fdt_header + fdt_rsvmap;
  const std::uint32_t size_struct = s.total_size - off_struct - strings;
  put_be32(p, 0xD00DFEED);
  put_be32(p + 4, s.total_size);
  put_be32(p + 8, off_struct);
  put_be32(p + 12, off_struct + size_struct);
  put_be32(p + 16, fdt_header);
  put_be32(p + 20, s.version);
  put_be32(p + 24, 16);
  put_be32(p + 28, 0);
  put_be32(p + 32, strings);
  put_be32(p + 36, size_struct);
  std::memset(p + fdt_header, 0, fdt_rsvmap);
  // FDT_BEGIN_NODE with the empty root name, then FDT_END at the block's end.
  put_be32(p + off_struct, 1);
  put_be32(p + off_struct + 4, 0);
  if (r.size() >= off_struct + size_struct) put_be32(p + off_struct + size_struct - 4, 9);
}

void write(const GzipSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  p[0] = 0x1F;
  p[1] = 0x8B;
  p[2] = 0x08;
  p[3] = s.original_name.empty() ? 0x00 : 0x08;
  put_le32(p + 4, s.mtime);
  p[8] = 0x00;
  p[9] = 0x03;  // Unix
  if (!s.original_name.empty()) {
    std::memcpy(p + 10, s.original_name.data(), s.original_name.size());
    p[10 + s.original_name.size()] = 0;
  }
}

void write(const UImageSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  const auto size = static_cast<std::uint32_t>(r.size() - uimage_header);
  put_be32(p, 0x27051956);
  put_be32(p + 4, 0);
  put_be32(p + 8, s.timestamp);
  put_be32(p + 12, size);
  put_be32(p + 16, s.load_address);
  put_be32(p + 20, s.entry_point);
  put_be32(p + 24, zlib_crc(r.subspan(uimage_header)));
  p[28] = s.os;
  p[29] = s.arch;
  p[30] = s.type;
  p[31] = s.compression;
  put_string(p + 32, 32, s.name);
  put_be32(p + 4, zlib_crc(r.first(uimage_header)));
}

void write(const BootImgSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  std::memset(p, 0, bootimg_header);
  std::memcpy(p, "ANDROID!", 8);
  put_le32(p + 8, s.kernel_size);
  put_le32(p + 12, 0x10008000);
  put_le32(p + 16, 0);
  put_le32(p + 20, 0x11000000);
  put_le32(p + 24, 0);
  put_le32(p + 28, 0x10F00000);
  put_le32(p + 32, 0x10000100);
  put_le32(p + 36, s.page_size);
  put_le32(p + 40, 0);
  put_string(p + 48, 16, s.name);
  put_string(p + 64, 512, "console=ttyS0,115200 rootfstype=squashfs");
}

void write(const ZImageSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  const auto word = [&](std::size_t at, std::uint32_t v) {
    s.big_endian ? put_be32(p + at, v) : put_le32(p + at, v);
  };
  for (std::size_t i = 0; i < 0x20; i += 4) word(i, 0xE1A00000);  // mov r0, r0
  word(0x20, 0xEA000003);                                         // b start
  word(0x24, 0x016F2818);
  word(0x28, 0);
  word(0x2C, static_cast<std::uint32_t>(r.size()));
  put_le32(p + 0x30, 0x04030201);
}

void write(const SquashfsSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  std::uint16_t block_log = 0;
  while ((std::uint32_t{1} << block_log) < s.block_size) ++block_log;
  const std::uint64_t used = s.bytes_used;
  std::memcpy(p, "hsqs", 4);
  put_le32(p + 4, s.inode_count);
  put_le32(p + 8, s.mod_time);
  put_le32(p + 12, s.block_size);
  put_le32(p + 16, s.inode_count / 16);
  put_le16(p + 20, s.compression_id);
  put_le16(p + 22, block_log);
  put_le16(p + 24, 0x00C0);
  put_le16(p + 26, 1);
  put_le16(p + 28, 4);
  put_le16(p + 30, 0);
  put_le64(p + 32, 0x1A0);
  put_le64(p + 40, used);
  put_le64(p + 48, used - 0x10);
  put_le64(p + 56, ~0ull);
  put_le64(p + 64, used * 3 / 4);
  put_le64(p + 72, used * 7 / 8);
  put_le64(p + 80, used - 0x40);
  put_le64(p + 88, used - 0x28);
}

void write(const Jffs2Spec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  const auto total = static_cast<std::uint32_t>(r.size());
  const std::uint32_t data_len = total - jffs2_inode_header;
  if (s.zlib_data) write_stored_zlib(r.subspan(jffs2_inode_header));
  put_le16(p, 0x1985);
  put_le16(p + 2, s.node_type);
  put_le32(p + 4, total);
  put_le32(p + 8, jffs2_crc(r.first(8)));
  if (s.node_type != 0xE002) return;
  put_le32(p + 12, s.inode);
  put_le32(p + 16, 1);
  put_le32(p + 20, 0100644);
  put_le16(p + 24, 0);
  put_le16(p + 26, 0);
  put_le32(p + 28, data_len);
  put_le32(p + 32, 0);
  put_le32(p + 36, 0);
  put_le32(p + 40, 0);
  put_le32(p + 44, 0);
  put_le32(p + 48, data_len);
  put_le32(p + 52, s.zlib_data ? static_cast<std::uint32_t>(stored_payload(data_len)) : data_len);
  p[56] = s.zlib_data ? 0x06 : 0x00;
  p[57] = 0;
  put_le16(p + 58, 0);
  put_le32(p + 60, jffs2_crc(r.subspan(jffs2_inode_header)));
  put_le32(p + 64, jffs2_crc(r.first(60)));
}

void write(const ZlibSpec&, std::span<std::uint8_t> r) { write_stored_zlib(r); }

void write(const LzmaSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  p[0] = s.properties;
  put_le32(p + 1, s.dictionary_size);
  put_le64(p + 5, s.uncompressed_size);
  p[13] = 0;
}

void write(const BmpSpec& s, std::span<std::uint8_t> r) {
  std::uint8_t* p = r.data();
  const std::uint64_t palette = bmp_palette(s);
  const auto pixels = static_cast<std::uint32_t>(14 + 40 + palette);
  const auto image = static_cast<std::uint32_t>(bmp_row(s) * s.height);
  p[0] = 'B';
  p[1] = 'M';
  put_le32(p + 2, pixels + image);
  put_le32(p + 6, 0);
  put_le32(p + 10, pixels);
  put_le32(p + 14, 40);
  put_le32(p + 18, s.width);
  put_le32(p + 22, s.height);
  put_le16(p + 26, 1);
  put_le16(p + 28, s.bits_per_pixel);
  put_le32(p + 30, 0);
  put_le32(p + 34, image);
  put_le32(p + 38, 2835);
  put_le32(p + 42, 2835);
  put_le32(p + 46, palette / 4);
  put_le32(p + 50, 0);
  const std::uint64_t entries = palette / 4;
  for (std::uint64_t i = 0; i < entries && 54 + 4 * i + 4 <= r.size(); ++i) {
    const auto gray = static_cast<std::uint8_t>(i * 255 / std::max<std::uint64_t>(1, entries - 1));
    std::uint8_t* e = p + 54 + 4 * i;
    e[0] = e[1] = e[2] = gray;
    e[3] = 0;
  }
}

}  // namespace

std::uint32_t adler32(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(
      ::adler32(::adler32(0L, nullptr, 0), data.data(), static_cast<uInt>(data.size())));
}

std::uint64_t minimum_region(const HeaderSpec& spec) {
  struct {
    std::uint64_t operator()(const std::monostate&) const { return 0; }
    std::uint64_t operator()(const FdtSpec&) const { return fdt_header + fdt_rsvmap; }
    std::uint64_t operator()(const GzipSpec& s) const {
      return 10 + (s.original_name.empty() ? 0 : s.original_name.size() + 1) + 16;
    }
    std::uint64_t operator()(const UImageSpec&) const { return uimage_header; }
    std::uint64_t operator()(const BootImgSpec& s) const {
      return std::max<std::uint64_t>(bootimg_header, s.page_size);
    }
    std::uint64_t operator()(const ZImageSpec&) const { return zimage_header; }
    std::uint64_t operator()(const SquashfsSpec&) const { return squashfs_superblock; }
    std::uint64_t operator()(const Jffs2Spec& s) const {
      return jffs2_inode_header + (s.zlib_data ? 18 : 0);
    }
    std::uint64_t operator()(const ZlibSpec&) const { return 18; }
    std::uint64_t operator()(const LzmaSpec&) const { return lzma_header + 17; }
    std::uint64_t operator()(const BmpSpec& s) const { return 54 + bmp_palette(s); }
  } visitor;
  return std::visit(visitor, spec);
}

void write_header(const HeaderSpec& spec, std::span<std::uint8_t> region) {
  if (region.size() < minimum_region(spec)) {
    throw std::invalid_argument("placement too small for its header");
  }
  if (const auto* g = std::get_if<GzipSpec>(&spec)) {
    if (g->original_name.find('\0') != std::string::npos) {
      throw std::invalid_argument("gzip name contains NUL");
    }
  }
  std::visit([&](const auto& s) { write(s, region); }, spec);
}

std::vector<std::pair<std::uint64_t, Format>> planted_formats(const HeaderSpec& spec) {
  struct {
    std::vector<std::pair<std::uint64_t, Format>> operator()(const std::monostate&) const {
      return {};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const FdtSpec&) const {
      return {{0, Format::fdt}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const GzipSpec&) const {
      return {{0, Format::gzip}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const UImageSpec&) const {
      return {{0, Format::uimage}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const BootImgSpec&) const {
      return {{0, Format::android_bootimg}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const ZImageSpec&) const {
      return {{0, Format::arm_zimage}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const SquashfsSpec&) const {
      return {{0, Format::squashfs}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const Jffs2Spec& s) const {
      if (s.zlib_data) return {{0, Format::jffs2_node}, {jffs2_inode_header, Format::zlib}};
      return {{0, Format::jffs2_node}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const ZlibSpec&) const {
      return {{0, Format::zlib}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const LzmaSpec&) const {
      return {{0, Format::lzma}};
    }
    std::vector<std::pair<std::uint64_t, Format>> operator()(const BmpSpec&) const {
      return {{0, Format::bmp}};
    }
  } visitor;
  return std::visit(visitor, spec);
}

}  // namespace fwtriage::detail
