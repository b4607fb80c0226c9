#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fwtriage/image.hpp"
#include "fwtriage/signatures.hpp"

namespace fwtriage {

// Header parameters for each plantable format. Unset fields default to what
// a typical build of that format would carry.
struct FdtSpec {
  std::uint32_t total_size = 4096;
  std::uint32_t version = 17;
};
struct GzipSpec {
  std::string original_name;  // empty: no FNAME field
  std::uint32_t mtime = 0;
};
struct UImageSpec {
  std::string name;
  std::uint32_t timestamp = 0;
  std::uint8_t os = 5;    // Linux
  std::uint8_t arch = 2;  // ARM
  std::uint8_t type = 2;  // kernel
  std::uint8_t compression = 0;
  std::uint32_t load_address = 0x80008000;
  std::uint32_t entry_point = 0x80008000;
};
struct BootImgSpec {
  std::uint32_t kernel_size = 0;
  std::uint32_t page_size = 2048;
  std::string name;
};
struct ZImageSpec {
  bool big_endian = false;
};
struct SquashfsSpec {
  std::uint64_t bytes_used = 0;
  std::uint32_t inode_count = 0;
  std::uint16_t compression_id = 4;  // xz
  std::uint32_t block_size = 131072;
  std::uint32_t mod_time = 0;
};
struct Jffs2Spec {
  std::uint16_t node_type = 0xE002;  // inode
  std::uint32_t inode = 1;
  bool zlib_data = false;  // inode payload is a zlib stream
};
/// A complete zlib stream built from stored blocks around the placement body.
struct ZlibSpec {};
struct LzmaSpec {
  std::uint8_t properties = 0x5D;
  std::uint32_t dictionary_size = 1u << 23;
  std::uint64_t uncompressed_size = ~0ull;
};
struct BmpSpec {
  std::uint32_t width = 1;
  std::uint32_t height = 1;
  std::uint16_t bits_per_pixel = 8;
};

using HeaderSpec = std::variant<std::monostate, FdtSpec, GzipSpec, UImageSpec, BootImgSpec,
                                ZImageSpec, SquashfsSpec, Jffs2Spec, ZlibSpec, LzmaSpec, BmpSpec>;

enum class BodyKind {
  seeded_random,  // uniform bytes, ~8 bits/byte
  constant,       // `constant` repeated
  structured,     // 64-symbol alphabet, ~6 bits/byte
  sparse_noise,   // fill with one byte in eight replaced by a random byte
};

std::string_view to_string(BodyKind k);

struct Placement {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  HeaderSpec header;
  BodyKind body = BodyKind::constant;
  std::uint8_t constant = 0x00;
  std::string label;
};

/// Regions are rendered in order from one SplitMix64(seed) stream: each
/// placement's body consumes the stream first, then its header is written over
/// the start of the region.
struct FixturePlan {
  std::uint64_t total_size = 0;
  std::vector<Placement> placements;
  std::uint8_t fill = 0xFF;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument on overlapping or out-of-range placements.
void check_plan(const FixturePlan& plan);

struct RenderedFixture {
  std::vector<std::uint8_t> bytes;
  SignatureMap expected_hits;  // sorted by (offset, format)
};

RenderedFixture render(const FixturePlan& plan);

/// Header size written for a format spec (the body starts after it).
std::uint64_t header_length(const HeaderSpec& spec);

struct SyntheticDump {
  FirmwareImage image;
  FixturePlan plan;
  SignatureMap expected_hits;
};

FixturePlan dense_plan(std::uint64_t seed);
FixturePlan sparse_plan(std::uint64_t seed);
/// Throws std::invalid_argument if noise_windows exceeds size / 4096.
FixturePlan erased_plan(std::uint64_t size, std::uint64_t noise_windows, std::uint64_t seed);
/// Small images with a random assortment of planted formats, for oracle checks.
FixturePlan assorted_plan(std::uint64_t seed, std::uint64_t total_size);

SyntheticDump synthesize(const FixturePlan& plan, AcquisitionMetadata metadata);

/// 16 MiB image laid out like a packed Linux build (bootloader, FDTs, Android
/// boot image with zImage, bitmaps, SquashFS root).
FirmwareImage make_dense_image(std::uint64_t seed);
/// 8 MiB erased flash with a uImage kernel and JFFS2 islands carrying zlib data.
FirmwareImage make_sparse_image(std::uint64_t seed);
/// Erased flash with a few windows of sparse noise and no signatures.
FirmwareImage make_erased_image(std::uint64_t size, std::uint64_t noise_windows,
                                std::uint64_t seed);

struct BitFlips {
  std::uint64_t count = 1;
  std::uint64_t seed = 0;
};
struct Truncate {
  std::uint64_t new_length = 0;
};
struct SectorFill {
  std::uint64_t start = 0;
  std::uint64_t length = 0;
  std::uint8_t value = 0xFF;
};
struct SectorShuffle {
  std::uint64_t seed = 0;
  std::uint64_t sector_size = 4096;
};

using CorruptionMode = std::variant<BitFlips, Truncate, SectorFill, SectorShuffle>;

/// New image with the corruption applied; `image` is left untouched. Bit flips
/// land on distinct bits. Throws std::invalid_argument on out-of-range parameters.
FirmwareImage corrupt(const FirmwareImage& image, const CorruptionMode& mode);

/// Ground-truth manifest: plan parameters, placements and expected hits.
std::string manifest_to_json(const SyntheticDump& dump, std::string_view generator);

}  // namespace fwtriage
