#include <doctest.h>

#include <cmath>

#include "fwtriage/entropy.hpp"
#include "fwtriage/errors.hpp"
#include "fwtriage/image.hpp"
#include "fwtriage/prng.hpp"
#include "oracles.hpp"

using namespace fwtriage;

namespace {

FirmwareImage image_of(std::vector<std::uint8_t> b) {
  AcquisitionMetadata m;
  m.device_model = "unit";
  const auto n = b.size();
  return FirmwareImage(std::move(b), std::max<std::size_t>(1, n), m);
}

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = rng.next_byte();
  return v;
}

}  // namespace

TEST_CASE("window entropy limits") {
  CHECK(window_entropy(std::vector<std::uint8_t>(4096, 0x00)) == 0.0);
  CHECK(window_entropy(std::vector<std::uint8_t>(1, 0x42)) == 0.0);
  std::vector<std::uint8_t> two(4096, 0);
  std::fill(two.begin() + 2048, two.end(), 0xFF);
  CHECK(window_entropy(two) == 1.0);
  std::vector<std::uint8_t> four(4096);
  for (std::size_t i = 0; i < four.size(); ++i) four[i] = static_cast<std::uint8_t>(i % 4);
  CHECK(window_entropy(four) == 2.0);
  std::vector<std::uint8_t> uniform(256 * 3);
  for (std::size_t i = 0; i < uniform.size(); ++i) uniform[i] = static_cast<std::uint8_t>(i);
  CHECK(window_entropy(uniform) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK_THROWS_AS(window_entropy({}), std::invalid_argument);
}

TEST_CASE("window entropy agrees with the histogram oracle") {
  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng.below(5000);
    auto data = random_bytes(n, rng.next());
    // Skew some windows towards a few symbols.
    if (i % 2) {
      for (auto& b : data) b &= static_cast<std::uint8_t>(rng.below(256));
    }
    const double h = window_entropy(data);
    CHECK(h == doctest::Approx(oracle::entropy(data)).epsilon(1e-12));
    CHECK(h >= 0.0);
    CHECK(h <= 8.0);
  }
}

TEST_CASE("band classification is strict at the thresholds") {
  CHECK(classify(0.999, 1.0, 7.0) == Band::low);
  CHECK(classify(1.0, 1.0, 7.0) == Band::mid);
  CHECK(classify(7.0, 1.0, 7.0) == Band::mid);
  CHECK(classify(7.001, 1.0, 7.0) == Band::high);
}

TEST_CASE("profile windows, offsets and dropped tail") {
  auto data = random_bytes(3 * 4096 + 100, 9);
  std::fill(data.begin(), data.begin() + 4096, 0xFF);
  const auto p = profile(image_of(data));
  REQUIRE(p.window_count() == 3);
  CHECK(p.window_offsets == std::vector<std::uint64_t>{0, 4096, 8192});
  CHECK(p.dropped_bytes == 100);
  CHECK(p.window_entropies[0] == 0.0);
  CHECK(p.low_fraction == doctest::Approx(1.0 / 3));
  CHECK(p.high_fraction == doctest::Approx(2.0 / 3));
  CHECK(p.band_at(0) == Band::low);
  CHECK(p.band_at(1) == Band::high);
  CHECK(p.source_length == data.size());
  const double mean = (p.window_entropies[0] + p.window_entropies[1] + p.window_entropies[2]) / 3;
  CHECK(p.mean == doctest::Approx(mean));
  double var = 0;
  for (const double h : p.window_entropies) var += (h - mean) * (h - mean);
  CHECK(p.std == doctest::Approx(std::sqrt(var / 3)));
}

TEST_CASE("profile rejects payloads shorter than a window") {
  CHECK_THROWS_AS(profile(image_of(std::vector<std::uint8_t>(4095, 0))), insufficient_data_error);
  ProfileOptions small;
  small.window_size = 512;
  CHECK(profile(image_of(std::vector<std::uint8_t>(4095, 0)), small).window_count() == 7);
}

TEST_CASE("identical windows give zero deviation exactly") {
  std::vector<std::uint8_t> data;
  const auto w = random_bytes(4096, 3);
  for (int i = 0; i < 50; ++i) data.insert(data.end(), w.begin(), w.end());
  const auto p = profile(image_of(data));
  CHECK(p.std == 0.0);
  CHECK(p.mean == p.window_entropies.front());
}

TEST_CASE("profile emission") {
  auto data = random_bytes(2 * 4096, 4);
  const auto p = profile(image_of(data));
  const auto csv = emit_profile(p, ProfileFormat::csv);
  CHECK(csv.rfind("offset,entropy_bits_per_byte\n", 0) == 0);
  CHECK(csv.find("\n4096,") != std::string::npos);
  const auto back = parse_profile_json(emit_profile(p, ProfileFormat::json));
  CHECK(back.window_count() == p.window_count());
  CHECK(back.mean == doctest::Approx(p.mean));
  CHECK(back.low_fraction == p.low_fraction);
  CHECK(back.source_digest == p.source_digest);
}
