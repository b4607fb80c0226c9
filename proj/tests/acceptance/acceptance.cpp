// End-to-end acceptance checks. One line per criterion, PASS or FAIL, with
// the measured values that decided it. Exit status is non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "fwtriage/consistency.hpp"
#include "fwtriage/corpus.hpp"
#include "fwtriage/entropy.hpp"
#include "fwtriage/image.hpp"
#include "fwtriage/prng.hpp"
#include "fwtriage/signatures.hpp"
#include "fwtriage/synth.hpp"
#include "fwtriage/validation.hpp"

using namespace fwtriage;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "FAILED: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

AcquisitionMetadata meta(const std::string& model, Fixture fixture = Fixture::none) {
  AcquisitionMetadata m;
  m.device_model = model;
  m.fixture = fixture;
  return m;
}

FirmwareImage assorted_image(std::uint64_t seed, std::uint64_t size) {
  return synthesize(assorted_plan(seed, size), meta("assorted")).image;
}

const std::uint64_t* field_u64(const SignatureHit& h, const std::string& key) {
  auto it = h.fields.find(key);
  return it == h.fields.end() ? nullptr : std::get_if<std::uint64_t>(&it->second);
}

const std::string* field_str(const SignatureHit& h, const std::string& key) {
  auto it = h.fields.find(key);
  return it == h.fields.end() ? nullptr : std::get_if<std::string>(&it->second);
}

// 1 ---------------------------------------------------------------------------
Check entropy_oracle() {
  Check o;
  const auto t0 = Clock::now();
  SplitMix64 rng(1001);
  double worst = 0.0;
  std::size_t windows = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::uint64_t size = 4096 + rng.below((1u << 20) - 4096 + 1);
    static constexpr std::array<std::size_t, 4> sizes{256, 1000, 4096, 65536};
    ProfileOptions opts;
    opts.window_size = sizes[i % sizes.size()];
    if (opts.window_size > size) opts.window_size = 4096;
    const auto image = assorted_image(i + 1, size);
    const auto p = profile(image, opts);
    const auto expected = oracle::window_entropies(image.bytes(), opts.window_size);
    o.require(p.window_count() == expected.size(), "window count for image " + std::to_string(i));
    for (std::size_t w = 0; w < std::min(expected.size(), p.window_count()); ++w) {
      worst = std::max(worst, std::abs(p.window_entropies[w] - expected[w]));
    }
    windows += expected.size();
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-12, "max deviation " + fmt("%.3g", worst));
  o.require(elapsed < 10.0, "runtime " + fmt("%.2f s", elapsed));
  o.note("100 images, " + std::to_string(windows) + " windows, max |diff| " + fmt("%.3g", worst) +
         ", " + fmt("%.2f s", elapsed));
  return o;
}

// 2 ---------------------------------------------------------------------------
Check entropy_limits() {
  Check o;
  const FirmwareImage erased(std::vector<std::uint8_t>(8u << 20, 0xFF), 8u << 20, meta("limit"));
  const auto p = profile(erased);
  o.require(p.mean == 0.0 && p.low_fraction == 1.0 && p.high_fraction == 0.0 && p.std == 0.0,
            "all-0xFF summary");
  std::vector<std::uint8_t> uniform(4096);
  for (std::size_t i = 0; i < uniform.size(); ++i) uniform[i] = static_cast<std::uint8_t>(i);
  const double h_uniform = window_entropy(uniform);
  o.require(h_uniform == 8.0, "uniform window gave " + fmt("%.17g", h_uniform));
  std::vector<std::uint8_t> half(4096, 0x00);
  std::fill(half.begin() + 2048, half.end(), 0xFF);
  const double h_half = window_entropy(half);
  o.require(h_half == 1.0, "half/half window gave " + fmt("%.17g", h_half));
  o.note("0xFF: mean " + fmt("%g", p.mean) + " low " + fmt("%g", p.low_fraction) + " high " +
         fmt("%g", p.high_fraction) + "; uniform " + fmt("%.17g", h_uniform) + "; half " +
         fmt("%.17g", h_half));
  return o;
}

// 3 ---------------------------------------------------------------------------
Check throughput() {
  Check o;
  const auto image = make_dense_image(1);
  const auto t0 = Clock::now();
  const auto p = profile(image);
  const double elapsed = seconds_since(t0);
  o.require(p.window_count() == 4096, "window count");
  o.require(elapsed < 2.0, "profile took " + fmt("%.3f s", elapsed));
  o.note("16 MiB profiled in " + fmt("%.3f s", elapsed));
  return o;
}

// 4 ---------------------------------------------------------------------------
Check scanner_oracle() {
  Check o;
  const auto catalog = SignatureCatalog::standard();
  std::size_t hits = 0;
  std::set<Format> formats;
  SplitMix64 rng(2002);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const std::uint64_t size = 16384 + rng.below((256u << 10) - 16384 + 1);
    const auto image = assorted_image(5000 + i, size);
    const auto fast = scan(image, catalog).hits;
    const auto slow = oracle::exhaustive_scan(image.bytes(), catalog);
    o.require(fast == slow, "fixture " + std::to_string(i) + " differs (" +
                                std::to_string(fast.size()) + " vs " +
                                std::to_string(slow.size()) + " hits)");
    hits += fast.size();
    for (const auto& h : fast) formats.insert(h.format);
  }
  o.require(formats.size() == 10, "only " + std::to_string(formats.size()) + " formats exercised");
  o.note("50 fixtures, " + std::to_string(hits) + " hits, " + std::to_string(formats.size()) +
         " formats, identical to the every-offset oracle");
  return o;
}

// 5 ---------------------------------------------------------------------------
Check table_reproduction() {
  Check o;
  const auto dense = synthesize(dense_plan(1), meta("HS175D"));
  const auto dense_hits = scan(dense.image).hits;
  const SignatureMap want{{0x29EE4, Format::fdt},          {0x40E00, Format::gzip},
                          {0x6AA00, Format::gzip},         {0x7D800, Format::fdt},
                          {0xB0000, Format::android_bootimg}, {0xB0800, Format::arm_zimage},
                          {0x35A800, Format::fdt},         {0x371200, Format::bmp},
                          {0x374600, Format::bmp},         {0x3B0000, Format::squashfs}};
  o.require(signature_map(dense_hits) == want, "dense signature map");
  o.require(dense.expected_hits == want, "dense ground truth");

  std::map<std::uint64_t, const SignatureHit*> at;
  for (const auto& h : dense_hits) at[h.offset] = &h;
  const auto u = [&](std::uint64_t off, const char* key) -> std::uint64_t {
    auto it = at.find(off);
    if (it == at.end()) return ~0ull;
    const auto* v = field_u64(*it->second, key);
    return v ? *v : ~0ull;
  };
  o.require(u(0x3B0000, "inode_count") == 1054, "SquashFS inode_count");
  o.require(u(0x3B0000, "bytes_used") == 10'609'848, "SquashFS bytes_used");
  o.require(u(0x29EE4, "total_size") == 6455 && u(0x29EE4, "version") == 17, "FDT 0x29EE4");
  o.require(u(0x7D800, "total_size") == 10931, "FDT 0x7D800");
  o.require(u(0x35A800, "total_size") == 92240, "FDT 0x35A800");
  o.require(u(0xB0000, "kernel_size") == 2'790'992, "bootimg kernel_size");
  for (const std::uint64_t bmp : {0x371200ull, 0x374600ull}) {
    o.require(u(bmp, "width") == 654 && u(bmp, "height") == 270 && u(bmp, "bits_per_pixel") == 8,
              "BMP geometry");
  }
  if (at.count(0x40E00)) {
    const auto* name = field_str(*at[0x40E00], "original_name");
    o.require(name && *name == "u-boot-nodtb.bin", "gzip name");
  }

  const auto sparse = synthesize(sparse_plan(7), meta("HS720"));
  const auto sparse_hits = scan(sparse.image).hits;
  o.require(signature_map(sparse_hits) == sparse.expected_hits, "sparse hits equal ground truth");
  bool uimage = false;
  std::size_t jffs2 = 0, extra = 0;
  for (const auto& h : sparse_hits) {
    if (h.offset == 0x90000 && h.format == Format::uimage) {
      uimage = true;
      const auto* name = field_str(h, "image_name");
      o.require(name && *name == "Linux-4.9.129", "uImage name");
    } else if (h.format == Format::jffs2_node && h.offset >= 0x390000 && h.offset <= 0x7FD280) {
      ++jffs2;
    } else if (h.format != Format::zlib) {
      ++extra;
    }
  }
  o.require(uimage, "uImage at 0x90000");
  o.require(jffs2 >= 40, "JFFS2 nodes " + std::to_string(jffs2));
  o.require(extra == 0, std::to_string(extra) + " unexpected hits");
  o.note("dense 10/10 planted hits with fields; sparse uImage@0x90000, " + std::to_string(jffs2) +
         " JFFS2 nodes, " + std::to_string(sparse_hits.size() - jffs2 - 1) +
         " planted zlib extents, no extras");
  return o;
}

// 6 ---------------------------------------------------------------------------
Check three_tier() {
  Check o;
  const auto dense = make_dense_image(1).with_metadata(meta("HS175D"));
  const std::vector<FirmwareImage> a{dense, dense, dense};
  const auto va = validate(a);
  o.require(va.overall == OverallStatus::validated, "(a) dense x3 gave " + va.summary());

  const auto sparse = make_sparse_image(7).with_metadata(meta("HS720"));
  const std::vector<FirmwareImage> b{sparse, sparse};
  const auto vb = validate(b);
  o.require(vb.overall == OverallStatus::validated &&
                vb.layout_character == LayoutCharacter::sparse,
            "(b) sparse x2 gave " + vb.summary() + " " +
                std::string(to_string(vb.layout_character)));

  const auto e1 = make_erased_image(8u << 20, 190, 3).with_metadata(meta("HS360S"));
  const auto e2 = make_erased_image(8u << 20, 190, 4).with_metadata(meta("HS360S"));
  o.require(e1.digest() != e2.digest(), "(c) erased reads differ");
  const std::vector<FirmwareImage> c{e1, e2};
  const auto vc = validate(c);
  o.require(vc.tier1 == TierResult::pass && vc.tier2 == TierResult::fail &&
                vc.tier3 == ContentClass::erased && vc.overall == OverallStatus::incomplete,
            "(c) erased pair gave " + vc.summary());
  o.note("(a) " + va.summary() + " " + std::string(to_string(va.overall)) + "; (b) " +
         vb.summary() + " " + std::string(to_string(vb.layout_character)) + "; (c) " +
         vc.summary() + " " + std::string(to_string(vc.overall)));
  return o;
}

// 7 ---------------------------------------------------------------------------
FirmwareImage flip(const FirmwareImage& img, std::uint64_t offset, unsigned bit) {
  std::vector<std::uint8_t> bytes(img.bytes().begin(), img.bytes().end());
  bytes[offset] ^= static_cast<std::uint8_t>(1u << bit);
  return FirmwareImage(std::move(bytes), img.declared_capacity(), img.metadata());
}

Check consistency() {
  Check o;
  SplitMix64 rng(3003);
  const auto base = assorted_image(77, 256u << 10);
  std::size_t correct = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t k = rng.below(base.size());
    const auto r = compare(base, flip(base, k, static_cast<unsigned>(rng.below(8))));
    if (!r.digest_equal && r.first_divergence == k) ++correct;
  }
  o.require(correct == 1000, std::to_string(correct) + "/1000 flips located");

  const auto dense = make_dense_image(1);
  std::size_t dense_correct = 0;
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t k = rng.below(dense.size());
    const auto r = compare(dense, flip(dense, k, static_cast<unsigned>(rng.below(8))));
    if (r.first_divergence == k) ++dense_correct;
  }
  o.require(dense_correct == 10, "dense flips located " + std::to_string(dense_correct) + "/10");

  const auto same = compare(dense, dense.with_metadata(meta("HS175D", Fixture::hook)));
  o.require(same.digest_equal && !same.first_divergence && same.signature_map_equal &&
                same.signature_deltas.empty() && same.consistent(),
            "identical inputs");

  std::size_t symmetric = 0;
  const int pairs = 200;
  for (int i = 0; i < pairs; ++i) {
    const auto a = assorted_image(9000 + rng.below(20), 32768 + rng.below(32768));
    FirmwareImage b = a;
    switch (rng.below(4)) {
      case 0: b = corrupt(a, BitFlips{1 + rng.below(5), rng.next()}); break;
      case 1: b = corrupt(a, Truncate{rng.below(a.size() + 1)}); break;
      case 2: {
        const std::uint64_t s = rng.below(a.size());
        b = corrupt(a, SectorFill{s, rng.below(a.size() - s + 1), 0xFF});
        break;
      }
      default: b = assorted_image(9000 + rng.below(20), 32768 + rng.below(32768)); break;
    }
    const auto ab = compare(a, b);
    const auto ba = compare(b, a);
    bool ok = ab.digest_equal == ba.digest_equal && ab.first_divergence == ba.first_divergence &&
              ab.signature_map_equal == ba.signature_map_equal &&
              ab.signature_deltas.size() == ba.signature_deltas.size();
    for (std::size_t d = 0; ok && d < ab.signature_deltas.size(); ++d) {
      const auto& x = ab.signature_deltas[d];
      const auto& y = ba.signature_deltas[d];
      ok = x.offset == y.offset && x.format == y.format && x.present_in != y.present_in;
    }
    if (ok) ++symmetric;
  }
  o.require(symmetric == static_cast<std::size_t>(pairs),
            "symmetry held on " + std::to_string(symmetric) + "/" + std::to_string(pairs));
  o.note("1000/1000 single-bit flips located on 256 KiB, 10/10 on 16 MiB; identical inputs "
         "consistent; symmetry on " + std::to_string(pairs) + " randomized pairs");
  return o;
}

// 8 ---------------------------------------------------------------------------
Check corpus_summary() {
  Check o;
  const fs::path dir = fs::temp_directory_path() / "fwtriage-acceptance-store";
  fs::remove_all(dir);
  struct Cell {
    const char* model;
    Fixture fixture;
    int attempts, successes;
    bool identical;
  };
  const std::vector<Cell> cells{{"HS175D", Fixture::alligator, 8, 5, true},
                                {"HS175D", Fixture::hook, 8, 6, true},
                                {"HS720", Fixture::alligator, 8, 4, true},
                                {"HS720", Fixture::hook, 8, 6, true},
                                {"HS360S", Fixture::hook, 10, 4, false}};
  const std::map<std::string, std::string> canonical{
      {"HS175D", "4a7f46cc581c45cbc46e28663d910a960f340f822fd3e05c1c5da4bf7fd8a7ff"},
      {"HS720", "0b327498562ac286c4dd14e57f87a1b4ba1f8986b4c0baa153bc4ce830c2a351"}};
  CorpusSummary first;
  {
    CorpusStore store(dir);
    for (const auto& c : cells) {
      for (int i = 0; i < c.attempts; ++i) {
        AttemptRecord r;
        r.device_model = c.model;
        r.interface = Interface::spi;
        r.fixture = c.fixture;
        r.outcome = i < c.successes ? fwtriage::Outcome::success : fwtriage::Outcome::failure;
        r.failure_type = i < c.successes ? FailureType::none : FailureType::clip_misalignment;
        store.record_attempt(r);
      }
      for (int d = 0; d < 2; ++d) {
        DumpRecord r;
        auto it = canonical.find(c.model);
        r.digest = it != canonical.end() && c.identical
                       ? Digest::from_hex(it->second)
                       : sha256(std::vector<std::uint8_t>{static_cast<std::uint8_t>(d), 1, 2});
        r.device_model = c.model;
        r.fixture = c.fixture;
        r.canonical = d == 0 && c.fixture == Fixture::hook;
        store.register_dump(r);
      }
    }
    first = store.summarize();
  }
  const std::map<std::string, std::pair<double, std::string>> want{
      {"HS175D/ALLIGATOR", {0.625, "~63%"}}, {"HS175D/HOOK", {0.75, "~75%"}},
      {"HS720/ALLIGATOR", {0.5, "~50%"}},    {"HS720/HOOK", {0.75, "~75%"}},
      {"HS360S/HOOK", {0.4, "~40%"}}};
  std::string rendered;
  o.require(first.size() == 5, "summary rows " + std::to_string(first.size()));
  for (const auto& row : first) {
    const std::string key = row.cell.device_model + "/" + std::string(to_string(row.cell.fixture));
    auto it = want.find(key);
    if (it == want.end()) {
      o.require(false, "unexpected row " + key);
      continue;
    }
    o.require(row.rate && *row.rate == it->second.first, key + " rate");
    o.require(render_rate(row.rate) == it->second.second, key + " rendered " + render_rate(row.rate));
    const auto flag = key == "HS360S/HOOK" ? HashAgreement::no : HashAgreement::yes;
    o.require(row.hashes_identical == flag, key + " hashes flag");
    rendered += (rendered.empty() ? "" : " ") + key + " " + render_rate(row.rate) + " " +
                std::string(to_string(row.hashes_identical));
  }
  CorpusStore reopened(dir);
  o.require(reopened.summarize() == first, "summary after reopening");
  o.require(reopened.attempts().size() == 42 && reopened.dumps().size() == 10, "record counts");
  fs::remove_all(dir);
  o.note(rendered + "; round-trip identical");
  return o;
}

// 9 ---------------------------------------------------------------------------
Check determinism() {
  Check o;
  const std::vector<std::pair<std::string, std::function<FirmwareImage()>>> gens{
      {"dense", [] { return make_dense_image(1); }},
      {"sparse", [] { return make_sparse_image(7); }},
      {"erased", [] { return make_erased_image(8u << 20, 190, 3); }},
      {"assorted", [] { return assorted_image(42, 200000); }},
      {"bit flips", [] { return corrupt(assorted_image(42, 200000), BitFlips{16, 5}); }},
      {"sector shuffle", [] { return corrupt(assorted_image(42, 200000), SectorShuffle{5, 4096}); }},
  };
  for (const auto& [name, gen] : gens) {
    o.require(gen().digest() == gen().digest(), name + " not reproducible");
  }
  o.require(make_dense_image(1).digest() != make_dense_image(2).digest(), "seeds 1 and 2 collide");
  o.note(std::to_string(gens.size()) + " generators byte-identical across runs");
  return o;
}

// 10 --------------------------------------------------------------------------
Check verdict_invariants() {
  Check o;
  SplitMix64 rng(4004);
  const std::array<TierResult, 3> tiers{TierResult::pass, TierResult::fail, TierResult::unevaluated};
  const std::array<ContentClass, 3> classes{ContentClass::validated_firmware, ContentClass::erased,
                                            ContentClass::indeterminate};
  std::size_t overall_violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto t1 = tiers[rng.below(2)];
    const auto t2 = tiers[rng.below(3)];
    const auto t3 = classes[rng.below(3)];
    const bool all = t1 == TierResult::pass && t2 == TierResult::pass &&
                     t3 == ContentClass::validated_firmware;
    if ((overall_status(t1, t2, t3) == OverallStatus::validated) != all) ++overall_violations;
  }
  o.require(overall_violations == 0, "overall-status violations " + std::to_string(overall_violations));

  // Validation runs on randomized read sets.
  std::size_t verdict_violations = 0;
  for (int i = 0; i < 40; ++i) {
    const auto kind = rng.below(3);
    const std::uint64_t cap = 65536;
    auto make = [&](std::uint64_t seed) {
      if (kind == 0) return synthesize(erased_plan(cap, rng.below(16), seed), meta("m")).image;
      return synthesize(assorted_plan(seed, cap), meta("m")).image;
    };
    std::vector<FirmwareImage> reads{make(i)};
    const auto extra = rng.below(3);
    for (std::uint64_t r = 0; r < extra; ++r) reads.push_back(rng.below(2) ? reads[0] : make(i + 100));
    if (rng.below(4) == 0) reads[0] = corrupt(reads[0], Truncate{cap - 1});
    const auto v = validate(reads);
    const bool all = v.tier1 == TierResult::pass && v.tier2 == TierResult::pass &&
                     v.tier3 == ContentClass::validated_firmware;
    if ((v.overall == OverallStatus::validated) != all) ++verdict_violations;
    if (v.tier3 == ContentClass::erased && v.layout_character != LayoutCharacter::empty) {
      ++verdict_violations;
    }
  }
  o.require(verdict_violations == 0, "verdict violations " + std::to_string(verdict_violations));

  std::size_t exclusivity_violations = 0;
  std::map<ContentClass, std::size_t> seen;
  static constexpr std::array<double, 6> edges{0.0, 0.3, 0.5, 0.85, 1.0, -1.0};
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + rng.below(64);
    std::vector<double> ent(n);
    const double bias = static_cast<double>(rng.below(1000)) / 1000.0;
    for (auto& e : ent) {
      const bool low = static_cast<double>(rng.below(1000)) / 1000.0 < bias;
      e = low ? static_cast<double>(rng.below(1000)) / 1000.0
              : 1.0 + static_cast<double>(rng.below(7001)) / 1000.0;
    }
    auto prof = summarize_windows(ent);
    // Pin fractions onto the rule boundaries now and then.
    if (rng.below(4) == 0) prof.low_fraction = edges[rng.below(5)];
    if (rng.below(4) == 0) prof.high_fraction = edges[rng.below(5)];
    ScanResult hits;
    hits.source_digest = prof.source_digest;
    hits.source_length = prof.source_length;
    const auto count = rng.below(4);
    for (std::uint64_t h = 0; h < count; ++h) {
      SignatureHit hit;
      hit.offset = h * 4096;
      hit.format = static_cast<Format>(rng.below(10));
      hit.format_class = static_cast<FormatClass>(rng.below(5));
      hits.hits.push_back(hit);
    }
    bool k = false, f = false, b = false;
    for (const auto& h : hits.hits) {
      k |= h.format_class == FormatClass::kernel;
      f |= h.format_class == FormatClass::filesystem;
      b |= h.format_class == FormatClass::bootloader_stage;
    }
    const bool erased_rule = prof.low_fraction >= 0.85 && !k && !f && !b;
    const bool validated_rule = k && f;
    const int applicable = int{erased_rule} + int{validated_rule};
    const auto r = tier3_content(prof, hits);
    ++seen[r.classification];
    bool ok = applicable <= 1;
    if (erased_rule) ok &= r.classification == ContentClass::erased && r.layout == LayoutCharacter::empty;
    if (validated_rule) {
      const auto layout = prof.high_fraction >= 0.5   ? LayoutCharacter::dense
                          : prof.low_fraction >= 0.3 ? LayoutCharacter::sparse
                                                     : LayoutCharacter::mixed;
      ok &= r.classification == ContentClass::validated_firmware && r.layout == layout;
    }
    if (applicable == 0) ok &= r.classification == ContentClass::indeterminate;
    if (!ok) ++exclusivity_violations;
  }
  o.require(exclusivity_violations == 0,
            "rule exclusivity violations " + std::to_string(exclusivity_violations));
  o.require(seen.size() == 3, "not every class reached");
  o.note("10,000 tier combinations, 40 randomized validations, 10,000 (profile, hits) inputs: "
         "0 violations (erased " + std::to_string(seen[ContentClass::erased]) + ", validated " +
         std::to_string(seen[ContentClass::validated_firmware]) + ", indeterminate " +
         std::to_string(seen[ContentClass::indeterminate]) + ")");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"AC1 entropy matches brute-force oracle", entropy_oracle},
      {"AC2 entropy limits exact", entropy_limits},
      {"AC3 16 MiB profile under 2 s", throughput},
      {"AC4 scanner matches every-offset oracle", scanner_oracle},
      {"AC5 planted offsets and fields on dense/sparse fixtures", table_reproduction},
      {"AC6 three-tier outcomes", three_tier},
      {"AC7 consistency checker", consistency},
      {"AC8 corpus summary rates and flags", corpus_summary},
      {"AC9 fixture determinism", determinism},
      {"AC10 verdict invariants", verdict_invariants},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Check o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
