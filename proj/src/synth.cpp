#include "fwtriage/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <numeric>
#include <set>
#include <stdexcept>

#include "fwtriage/prng.hpp"
#include "header_writers.hpp"

namespace fwtriage {

namespace {

constexpr std::uint64_t window = 4096;
constexpr std::uint64_t mib = 1ull << 20;

// 2023-07-10 12:00:00 UTC and 2022-05-31 08:00:00 UTC.
constexpr std::uint32_t bootloader_mtime = 1688990400;
constexpr std::uint32_t kernel_build_time = 1653984000;

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(v));
  return buf;
}

void fill_body(std::span<std::uint8_t> out, const Placement& p, SplitMix64& rng) {
  switch (p.body) {
    case BodyKind::constant:
      std::fill(out.begin(), out.end(), p.constant);
      break;
    case BodyKind::seeded_random:
      for (auto& b : out) b = rng.next_byte();
      break;
    case BodyKind::structured:
      for (auto& b : out) b = static_cast<std::uint8_t>(0x20 + (rng.next_byte() & 0x3F));
      break;
    case BodyKind::sparse_noise:
      for (auto& b : out) {
        const std::uint8_t r = rng.next_byte();
        b = (r & 7) == 0 ? rng.next_byte() : p.constant;
      }
      break;
  }
}

Placement pad(std::uint64_t from, std::uint64_t to, std::uint8_t value, std::string label) {
  return Placement{from, to - from, std::monostate{}, BodyKind::constant, value, std::move(label)};
}

std::optional<Format> primary_format(const HeaderSpec& spec) {
  const auto planted = detail::planted_formats(spec);
  if (planted.empty()) return std::nullopt;
  return planted.front().second;
}

nlohmann::ordered_json spec_json(const HeaderSpec& spec) {
  struct {
    nlohmann::ordered_json operator()(const std::monostate&) const { return nullptr; }
    nlohmann::ordered_json operator()(const FdtSpec& s) const {
      return {{"total_size", s.total_size}, {"version", s.version}};
    }
    nlohmann::ordered_json operator()(const GzipSpec& s) const {
      return {{"original_name", s.original_name}, {"mtime", s.mtime}};
    }
    nlohmann::ordered_json operator()(const UImageSpec& s) const {
      return {{"name", s.name},       {"timestamp", s.timestamp}, {"os", s.os},
              {"arch", s.arch},       {"type", s.type},           {"compression", s.compression},
              {"load_address", s.load_address}, {"entry_point", s.entry_point}};
    }
    nlohmann::ordered_json operator()(const BootImgSpec& s) const {
      return {{"kernel_size", s.kernel_size}, {"page_size", s.page_size}, {"name", s.name}};
    }
    nlohmann::ordered_json operator()(const ZImageSpec& s) const {
      return {{"big_endian", s.big_endian}};
    }
    nlohmann::ordered_json operator()(const SquashfsSpec& s) const {
      return {{"bytes_used", s.bytes_used},
              {"inode_count", s.inode_count},
              {"compression_id", s.compression_id},
              {"block_size", s.block_size},
              {"mod_time", s.mod_time}};
    }
    nlohmann::ordered_json operator()(const Jffs2Spec& s) const {
      return {{"node_type", s.node_type}, {"inode", s.inode}, {"zlib_data", s.zlib_data}};
    }
    nlohmann::ordered_json operator()(const ZlibSpec&) const {
      return nlohmann::ordered_json::object();
    }
    nlohmann::ordered_json operator()(const LzmaSpec& s) const {
      return {{"properties", s.properties},
              {"dictionary_size", s.dictionary_size},
              {"uncompressed_size", s.uncompressed_size}};
    }
    nlohmann::ordered_json operator()(const BmpSpec& s) const {
      return {{"width", s.width}, {"height", s.height}, {"bits_per_pixel", s.bits_per_pixel}};
    }
  } visitor;
  return std::visit(visitor, spec);
}

}  // namespace

std::string_view to_string(BodyKind k) {
  switch (k) {
    case BodyKind::seeded_random: return "SEEDED_RANDOM";
    case BodyKind::constant: return "CONSTANT";
    case BodyKind::structured: return "STRUCTURED";
    case BodyKind::sparse_noise: return "SPARSE_NOISE";
  }
  return "?";
}

std::uint64_t header_length(const HeaderSpec& spec) {
  struct {
    std::uint64_t operator()(const std::monostate&) const { return 0; }
    std::uint64_t operator()(const FdtSpec&) const { return 56; }
    std::uint64_t operator()(const GzipSpec& s) const {
      return 10 + (s.original_name.empty() ? 0 : s.original_name.size() + 1);
    }
    std::uint64_t operator()(const UImageSpec&) const { return 64; }
    std::uint64_t operator()(const BootImgSpec&) const { return 1632; }
    std::uint64_t operator()(const ZImageSpec&) const { return 0x34; }
    std::uint64_t operator()(const SquashfsSpec&) const { return 96; }
    std::uint64_t operator()(const Jffs2Spec& s) const { return s.zlib_data ? 75 : 68; }
    std::uint64_t operator()(const ZlibSpec&) const { return 7; }
    std::uint64_t operator()(const LzmaSpec&) const { return 13; }
    std::uint64_t operator()(const BmpSpec& s) const {
      return 54 + (s.bits_per_pixel <= 8 ? (std::uint64_t{4} << s.bits_per_pixel) : 0);
    }
  } visitor;
  return std::visit(visitor, spec);
}

void check_plan(const FixturePlan& plan) {
  if (plan.total_size == 0) throw std::invalid_argument("fixture plan with zero size");
  std::vector<const Placement*> order;
  for (const auto& p : plan.placements) {
    if (p.offset > plan.total_size || p.length > plan.total_size - p.offset) {
      throw std::invalid_argument("placement '" + p.label + "' at " + hex(p.offset) +
                                  " runs past the image end");
    }
    if (p.length < detail::minimum_region(p.header)) {
      throw std::invalid_argument("placement '" + p.label + "' is too small for its header");
    }
    order.push_back(&p);
  }
  std::sort(order.begin(), order.end(),
            [](const Placement* a, const Placement* b) { return a->offset < b->offset; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i - 1]->offset + order[i - 1]->length > order[i]->offset) {
      throw std::invalid_argument("placements '" + order[i - 1]->label + "' and '" +
                                  order[i]->label + "' overlap");
    }
  }
}

RenderedFixture render(const FixturePlan& plan) {
  check_plan(plan);
  RenderedFixture out;
  out.bytes.assign(plan.total_size, plan.fill);
  SplitMix64 rng(plan.seed);
  for (const auto& p : plan.placements) {
    const std::span<std::uint8_t> region(out.bytes.data() + p.offset, p.length);
    fill_body(region, p, rng);
    detail::write_header(p.header, region);
    for (const auto& [rel, format] : detail::planted_formats(p.header)) {
      out.expected_hits.emplace_back(p.offset + rel, format);
    }
  }
  std::sort(out.expected_hits.begin(), out.expected_hits.end());
  return out;
}

FixturePlan dense_plan(std::uint64_t seed) {
  constexpr std::uint32_t kernel_size = 2'790'992;
  FixturePlan plan;
  plan.total_size = 16 * mib;
  plan.fill = 0xFF;
  plan.seed = seed;
  auto& v = plan.placements;
  v.push_back({0x0, 0x20000, std::monostate{}, BodyKind::structured, 0, "spl"});
  v.push_back(pad(0x20000, 0x29EE4, 0x00, "spl padding"));
  v.push_back({0x29EE4, 6455, FdtSpec{6455, 17}, BodyKind::structured, 0, "spl dtb"});
  v.push_back(pad(0x29EE4 + 6455, 0x40E00, 0x00, "spl dtb padding"));
  v.push_back({0x40E00, 0x6AA00 - 0x40E00, GzipSpec{"u-boot-nodtb.bin", bootloader_mtime},
               BodyKind::seeded_random, 0, "u-boot"});
  v.push_back({0x6AA00, 0x7D800 - 0x6AA00, GzipSpec{"tee.bin", bootloader_mtime},
               BodyKind::seeded_random, 0, "tee"});
  v.push_back({0x7D800, 10931, FdtSpec{10931, 17}, BodyKind::structured, 0, "u-boot dtb"});
  v.push_back(pad(0x7D800 + 10931, 0xB0000, 0x00, "u-boot padding"));
  v.push_back({0xB0000, 0x800, BootImgSpec{kernel_size, 2048, ""}, BodyKind::constant, 0x00,
               "boot header"});
  v.push_back({0xB0800, kernel_size, ZImageSpec{}, BodyKind::seeded_random, 0, "kernel"});
  v.push_back(pad(0xB0800 + kernel_size, 0x35A800, 0x00, "kernel padding"));
  v.push_back({0x35A800, 92240, FdtSpec{92240, 17}, BodyKind::structured, 0, "kernel dtb"});
  v.push_back(pad(0x35A800 + 92240, 0x371200, 0x00, "dtb padding"));
  // The first logo's declared file runs into the second; only its head fits.
  v.push_back({0x371200, 0x374600 - 0x371200, BmpSpec{654, 270, 8}, BodyKind::structured, 0,
               "logo"});
  v.push_back({0x374600, 178198, BmpSpec{654, 270, 8}, BodyKind::structured, 0, "logo"});
  v.push_back(pad(0x374600 + 178198, 0x3B0000, 0x00, "logo padding"));
  v.push_back({0x3B0000, 10'609'848, SquashfsSpec{10'609'848, 1054, 4, 131072, kernel_build_time},
               BodyKind::seeded_random, 0, "rootfs"});
  return plan;
}

FixturePlan sparse_plan(std::uint64_t seed) {
  constexpr std::uint64_t jffs2_start = 0x390000;
  constexpr std::uint64_t jffs2_span = 0x7FD280 - jffs2_start;
  constexpr std::uint64_t nodes = 128;
  constexpr std::uint64_t zlib_lo = 0x621000, zlib_hi = 0x6C0000;
  constexpr std::uint64_t data_node = 0x3800, zlib_node = 0x450, large_zlib_node = 0x3080;

  FixturePlan plan;
  plan.total_size = 8 * mib;
  plan.fill = 0xFF;
  plan.seed = seed;
  auto& v = plan.placements;
  v.push_back({0x90000, 64 + 0x1F0000,
               UImageSpec{"Linux-4.9.129", kernel_build_time, 5, 2, 2, 0, 0x80008000, 0x80008000},
               BodyKind::structured, 0, "kernel"});

  bool large_done = false;
  std::uint64_t zlib_nodes = 0;
  for (std::uint64_t i = 0; i < nodes; ++i) {
    const std::uint64_t off = jffs2_start + (i * jffs2_span / (nodes - 1) & ~std::uint64_t{3});
    const auto ino = static_cast<std::uint32_t>(i + 2);
    const bool zlib = off >= zlib_lo && off + large_zlib_node <= zlib_hi;
    if (zlib) {
      // One larger compressed extent, a few nodes in, leaves a couple of
      // high-entropy windows.
      const bool large = !large_done && ++zlib_nodes == 8;
      large_done = large_done || large;
      v.push_back({off, large ? large_zlib_node : zlib_node, Jffs2Spec{0xE002, ino, true},
                   BodyKind::seeded_random, 0, "jffs2 compressed inode"});
    } else {
      const std::uint64_t len = std::min(data_node, plan.total_size - off);
      v.push_back({off, len, Jffs2Spec{0xE002, ino, false}, BodyKind::structured, 0,
                   "jffs2 inode"});
    }
  }
  return plan;
}

FixturePlan erased_plan(std::uint64_t size, std::uint64_t noise_windows, std::uint64_t seed) {
  if (size == 0) throw std::invalid_argument("erased image size must be positive");
  const std::uint64_t windows = size / window;
  if (noise_windows > windows) {
    throw std::invalid_argument("noise_windows " + std::to_string(noise_windows) +
                                " exceeds the " + std::to_string(windows) + " windows available");
  }
  // Window choice draws from its own stream so bodies stay a function of `seed` alone.
  SplitMix64 pick(~seed);
  std::vector<std::uint64_t> idx(windows);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::uint64_t k = 0; k < noise_windows; ++k) {
    std::swap(idx[k], idx[k + pick.below(windows - k)]);
  }
  idx.resize(noise_windows);
  std::sort(idx.begin(), idx.end());

  FixturePlan plan;
  plan.total_size = size;
  plan.fill = 0xFF;
  plan.seed = seed;
  for (const auto w : idx) {
    plan.placements.push_back(
        {w * window, window, std::monostate{}, BodyKind::sparse_noise, 0xFF, "stray bits"});
  }
  return plan;
}

FixturePlan assorted_plan(std::uint64_t seed, std::uint64_t total_size) {
  if (total_size < 4096) throw std::invalid_argument("assorted fixtures need at least 4 KiB");
  SplitMix64 rng(seed ^ 0xA5A5A5A5A5A5A5A5ull);
  FixturePlan plan;
  plan.total_size = total_size;
  plan.fill = rng.below(2) ? 0xFF : 0x00;
  plan.seed = seed;

  static const std::array<std::string, 5> names{"u-boot.bin", "tee.bin", "vmlinux.bin",
                                                "rootfs.img", ""};
  const auto noisy = [&] {
    return rng.below(2) ? BodyKind::seeded_random : BodyKind::structured;
  };
  const auto any_body = [&] {
    switch (rng.below(4)) {
      case 0: return BodyKind::seeded_random;
      case 1: return BodyKind::structured;
      case 2: return BodyKind::sparse_noise;
      default: return BodyKind::constant;
    }
  };

  std::uint64_t cursor = rng.below(2048);
  while (true) {
    Placement p;
    p.constant = static_cast<std::uint8_t>(rng.below(2) ? 0xFF : 0x00);
    switch (rng.below(12)) {
      case 0: {
        const auto total = static_cast<std::uint32_t>(96 + rng.below(8192));
        p.header = FdtSpec{total, static_cast<std::uint32_t>(16 + rng.below(2))};
        p.length = total;
        p.body = any_body();
        break;
      }
      case 1:
        p.header = GzipSpec{names[rng.below(names.size())],
                            static_cast<std::uint32_t>(rng.below(0x70000000))};
        p.length = 64 + rng.below(16384);
        p.body = noisy();
        break;
      case 2:
        p.header = UImageSpec{"Linux-" + std::to_string(rng.below(7)),
                              static_cast<std::uint32_t>(rng.below(0x70000000)),
                              5,
                              static_cast<std::uint8_t>(1 + rng.below(8)),
                              static_cast<std::uint8_t>(1 + rng.below(8)),
                              static_cast<std::uint8_t>(rng.below(4)),
                              0x80008000,
                              0x80008000};
        p.length = 64 + rng.below(16384);
        p.body = any_body();
        break;
      case 3: {
        const std::uint32_t page = rng.below(2) ? 2048 : 4096;
        const auto kernel = static_cast<std::uint32_t>(1 + rng.below(3 * page));
        p.header = BootImgSpec{kernel, page, rng.below(2) ? "synth" : ""};
        p.length = page + (kernel + page - 1) / page * page;
        p.body = any_body();
        break;
      }
      case 4:
        p.header = ZImageSpec{rng.below(2) == 1};
        p.length = 0x40 + rng.below(16384);
        p.body = any_body();
        break;
      case 5: {
        const auto log = static_cast<std::uint32_t>(12 + rng.below(9));
        p.length = 96 + rng.below(16384);
        p.header = SquashfsSpec{p.length, static_cast<std::uint32_t>(rng.below(5000)),
                                static_cast<std::uint16_t>(1 + rng.below(6)), 1u << log,
                                static_cast<std::uint32_t>(rng.below(0x70000000))};
        p.body = any_body();
        break;
      }
      case 6:
        p.header = Jffs2Spec{0xE002, static_cast<std::uint32_t>(1 + rng.below(1000)), false};
        p.length = 68 + rng.below(4096);
        p.body = any_body();
        break;
      case 7:
        p.header = Jffs2Spec{0xE002, static_cast<std::uint32_t>(1 + rng.below(1000)), true};
        p.length = 68 + 24 + rng.below(4096);
        p.body = noisy();
        break;
      case 8:
        p.header = ZlibSpec{};
        p.length = 24 + rng.below(8192);
        p.body = noisy();
        break;
      case 9:
        p.header = LzmaSpec{0x5D, 1u << (12 + rng.below(14)),
                            rng.below(2) ? ~0ull : rng.below(1ull << 30)};
        p.length = 32 + rng.below(8192);
        p.body = noisy();
        break;
      case 10: {
        static constexpr std::array<std::uint16_t, 4> depths{1, 4, 8, 24};
        const BmpSpec s{static_cast<std::uint32_t>(1 + rng.below(64)),
                        static_cast<std::uint32_t>(1 + rng.below(64)),
                        depths[rng.below(depths.size())]};
        const std::uint64_t palette = s.bits_per_pixel <= 8 ? 4ull << s.bits_per_pixel : 0;
        const std::uint64_t row = (std::uint64_t{s.width} * s.bits_per_pixel + 31) / 32 * 4;
        p.header = s;
        p.length = 54 + palette + row * s.height;
        p.body = noisy();
        break;
      }
      default:
        p.header = std::monostate{};
        p.length = 1 + rng.below(8192);
        p.body = any_body();
        break;
    }
    if (cursor + p.length > total_size) break;
    p.offset = cursor;
    p.label = primary_format(p.header) ? std::string(to_string(*primary_format(p.header)))
                                       : std::string("filler");
    cursor += p.length + rng.below(1024);
    plan.placements.push_back(std::move(p));
  }
  return plan;
}

SyntheticDump synthesize(const FixturePlan& plan, AcquisitionMetadata metadata) {
  auto rendered = render(plan);
  FirmwareImage image(std::move(rendered.bytes), plan.total_size, std::move(metadata));
  return SyntheticDump{std::move(image), plan, std::move(rendered.expected_hits)};
}

namespace {

AcquisitionMetadata synthetic_metadata(std::string model) {
  AcquisitionMetadata m;
  m.device_model = std::move(model);
  m.interface = Interface::spi;
  m.fixture = Fixture::none;
  m.power_source = PowerSource::unknown;
  m.notes = "synthetic";
  return m;
}

}  // namespace

FirmwareImage make_dense_image(std::uint64_t seed) {
  return synthesize(dense_plan(seed), synthetic_metadata("HS175D")).image;
}

FirmwareImage make_sparse_image(std::uint64_t seed) {
  return synthesize(sparse_plan(seed), synthetic_metadata("HS720")).image;
}

FirmwareImage make_erased_image(std::uint64_t size, std::uint64_t noise_windows,
                                std::uint64_t seed) {
  return synthesize(erased_plan(size, noise_windows, seed), synthetic_metadata("HS360S")).image;
}

FirmwareImage corrupt(const FirmwareImage& image, const CorruptionMode& mode) {
  const auto src = image.bytes();
  std::vector<std::uint8_t> out(src.begin(), src.end());
  const std::uint64_t n = out.size();

  if (const auto* m = std::get_if<BitFlips>(&mode)) {
    if (m->count > n * 8) throw std::invalid_argument("more bit flips than bits in the image");
    SplitMix64 rng(m->seed);
    std::set<std::uint64_t> bits;
    while (bits.size() < m->count) bits.insert(rng.below(n * 8));
    for (const auto bit : bits) out[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
  } else if (const auto* m = std::get_if<Truncate>(&mode)) {
    if (m->new_length > n) throw std::invalid_argument("truncation longer than the image");
    out.resize(m->new_length);
  } else if (const auto* m = std::get_if<SectorFill>(&mode)) {
    if (m->start > n || m->length > n - m->start) {
      throw std::invalid_argument("sector fill outside the image");
    }
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(m->start), m->length, m->value);
  } else if (const auto* m = std::get_if<SectorShuffle>(&mode)) {
    if (m->sector_size == 0) throw std::invalid_argument("sector size must be positive");
    const std::uint64_t sectors = n / m->sector_size;
    std::vector<std::uint64_t> order(sectors);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(m->seed);
    for (std::uint64_t i = sectors; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::uint64_t s = 0; s < sectors; ++s) {
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(order[s] * m->sector_size),
                  m->sector_size, out.begin() + static_cast<std::ptrdiff_t>(s * m->sector_size));
    }
  }
  return FirmwareImage(std::move(out), image.declared_capacity(), image.metadata());
}

std::string manifest_to_json(const SyntheticDump& dump, std::string_view generator) {
  const auto& plan = dump.plan;
  nlohmann::ordered_json j;
  j["generator"] = generator;
  j["prng"] = "splitmix64";
  j["seed"] = plan.seed;
  j["total_size"] = plan.total_size;
  j["fill"] = plan.fill;
  j["sha256"] = dump.image.digest().hex();
  auto placements = nlohmann::ordered_json::array();
  for (const auto& p : plan.placements) {
    nlohmann::ordered_json o;
    o["offset"] = p.offset;
    o["offset_hex"] = hex(p.offset);
    o["length"] = p.length;
    const auto format = primary_format(p.header);
    o["format"] = format ? nlohmann::ordered_json(to_string(*format)) : nlohmann::ordered_json();
    o["header"] = spec_json(p.header);
    o["body"] = to_string(p.body);
    if (p.body == BodyKind::constant || p.body == BodyKind::sparse_noise) o["constant"] = p.constant;
    o["label"] = p.label;
    placements.push_back(std::move(o));
  }
  j["placements"] = std::move(placements);
  auto hits = nlohmann::ordered_json::array();
  for (const auto& [off, fmt] : dump.expected_hits) {
    hits.push_back({{"offset", off}, {"offset_hex", hex(off)}, {"format", to_string(fmt)}});
  }
  j["expected_hits"] = std::move(hits);
  return j.dump(2);
}

}  // namespace fwtriage
