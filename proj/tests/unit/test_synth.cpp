#include <doctest.h>

#include <bit>
#include <json.hpp>
#include <set>

#include "fwtriage/entropy.hpp"
#include "fwtriage/image.hpp"
#include "fwtriage/synth.hpp"
#include "fwtriage/validation.hpp"

using namespace fwtriage;

namespace {

AcquisitionMetadata meta() {
  AcquisitionMetadata m;
  m.device_model = "unit";
  return m;
}

std::size_t bit_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return n;
}

}  // namespace

TEST_CASE("assorted fixtures scan to their ground truth") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto dump = synthesize(assorted_plan(seed, 128 * 1024), meta());
    CHECK(dump.image.size() == 128 * 1024);
    CHECK(signature_map(scan(dump.image).hits) == dump.expected_hits);
  }
}

TEST_CASE("plans are checked before rendering") {
  FixturePlan plan;
  plan.total_size = 0x1000;
  Placement a;
  a.offset = 0x800;
  a.length = 0x900;
  plan.placements = {a};
  CHECK_THROWS_AS(check_plan(plan), std::invalid_argument);
  a.length = 0x400;
  Placement b = a;
  b.offset = 0xA00;
  plan.placements = {b, a};
  CHECK_THROWS_AS(check_plan(plan), std::invalid_argument);  // overlap, any order
  b.offset = 0xC00;
  plan.placements = {b, a};
  CHECK_NOTHROW(check_plan(plan));
  Placement small;
  small.offset = 0;
  small.length = 8;
  small.header = SquashfsSpec{};
  plan.placements = {small};
  CHECK_THROWS_AS(check_plan(plan), std::invalid_argument);  // too small for its header
}

TEST_CASE("rendering is deterministic and seed dependent") {
  const auto p = assorted_plan(5, 64 * 1024);
  CHECK(render(p).bytes == render(p).bytes);
  CHECK(render(assorted_plan(6, 64 * 1024)).bytes != render(p).bytes);
  CHECK(make_sparse_image(1).digest() == make_sparse_image(1).digest());
  CHECK(make_sparse_image(1).digest() != make_sparse_image(2).digest());
}

TEST_CASE("bit flips land on distinct bits") {
  const auto img = synthesize(assorted_plan(9, 64 * 1024), meta()).image;
  const auto flipped = corrupt(img, BitFlips{500, 3});
  CHECK(flipped.size() == img.size());
  CHECK(bit_distance(img.bytes(), flipped.bytes()) == 500);
  CHECK(flipped.declared_capacity() == img.declared_capacity());
  CHECK(flipped.metadata() == img.metadata());
  CHECK(corrupt(img, BitFlips{500, 3}).digest() == flipped.digest());
  CHECK_THROWS_AS(corrupt(img, BitFlips{img.size() * 8 + 1, 3}), std::invalid_argument);
}

TEST_CASE("truncation and sector fill") {
  const auto img = make_sparse_image(1);
  const auto before = img.digest();
  const auto cut = corrupt(img, Truncate{img.size() - 1});
  CHECK(cut.size() == img.size() - 1);
  CHECK(tier1_size(cut) == TierResult::fail);
  CHECK_THROWS_AS(corrupt(img, Truncate{img.size() + 1}), std::invalid_argument);

  const auto filled = corrupt(img, SectorFill{0x1000, 0x2000, 0x00});
  for (std::size_t i = 0x1000; i < 0x3000; ++i) REQUIRE(filled.bytes()[i] == 0x00);
  CHECK(filled.bytes()[0x3000] == img.bytes()[0x3000]);
  CHECK_THROWS_AS(corrupt(img, SectorFill{img.size() - 10, 11, 0}), std::invalid_argument);
  CHECK(img.digest() == before);
}

TEST_CASE("sector fill over the squashfs superblock removes the hit") {
  const auto img = make_dense_image(1);
  const auto filled = corrupt(img, SectorFill{0x3B0000, 0x1000, 0xFF});
  const auto has_squash = [](const FirmwareImage& i) {
    for (const auto& h : scan(i).hits) {
      if (h.format == Format::squashfs && h.offset == 0x3B0000) return true;
    }
    return false;
  };
  CHECK(has_squash(img));
  CHECK_FALSE(has_squash(filled));
}

TEST_CASE("sector shuffle permutes whole sectors") {
  const auto img = synthesize(assorted_plan(3, 64 * 1024), meta()).image;
  const auto shuffled = corrupt(img, SectorShuffle{7, 4096});
  CHECK(shuffled.size() == img.size());
  CHECK(shuffled.digest() != img.digest());
  std::multiset<std::vector<std::uint8_t>> a, b;
  for (std::size_t off = 0; off < img.size(); off += 4096) {
    a.emplace(img.bytes().begin() + off, img.bytes().begin() + off + 4096);
    b.emplace(shuffled.bytes().begin() + off, shuffled.bytes().begin() + off + 4096);
  }
  CHECK(a == b);
  CHECK_THROWS_AS(corrupt(img, SectorShuffle{7, 0}), std::invalid_argument);
}

TEST_CASE("erased images") {
  const auto blank = make_erased_image(8u << 20, 0, 1);
  const auto p = profile(blank);
  CHECK(p.mean == 0.0);
  CHECK(p.low_fraction == 1.0);
  CHECK(scan(blank).hits.empty());

  const auto noisy = make_erased_image(1u << 20, 16, 1);
  const auto pn = profile(noisy);
  CHECK(pn.low_fraction == doctest::Approx(240.0 / 256));
  CHECK(tier3_content(pn, scan(noisy)).classification == ContentClass::erased);
  CHECK_THROWS_AS(erased_plan(1u << 20, 257, 1), std::invalid_argument);
}

TEST_CASE("sparse fixture character") {
  const auto img = make_sparse_image(1);
  const auto p = profile(img);
  CHECK(p.low_fraction >= 0.3);
  CHECK(p.low_fraction <= 0.7);
  CHECK(p.high_fraction < 0.05);
  const auto a = tier3_content(p, scan(img));
  CHECK(a == ContentAssessment{ContentClass::validated_firmware, LayoutCharacter::sparse});
}

TEST_CASE("manifest lists the plan and expected hits") {
  const auto dump = synthesize(assorted_plan(4, 64 * 1024), meta());
  const auto j = nlohmann::json::parse(manifest_to_json(dump, "unit"));
  CHECK(j["generator"] == "unit");
  CHECK(j["prng"] == "splitmix64");
  CHECK(j["total_size"] == 64 * 1024);
  CHECK(j["sha256"] == dump.image.digest().hex());
  CHECK(j["placements"].size() == dump.plan.placements.size());
  CHECK(j["expected_hits"].size() == dump.expected_hits.size());
}
