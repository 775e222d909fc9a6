#include <doctest.h>

#include <cmath>

#include "velo/errors.hpp"
#include "velo/histogram.hpp"
#include "velo/rng.hpp"
#include "velo/stats.hpp"

using namespace velo;

namespace {

double binned_mass(const dist::Histogram& hist) {
  double mass = 0.0;
  for (std::size_t i = 0; i < hist.bin_count(); ++i)
    mass += hist.densities[i] * hist.bin_width(i);
  return mass;
}

}  // namespace

TEST_CASE("fixed-width bins on a small integer sample") {
  SampleSet samples;
  samples.values = {0, 0, 1, 1};
  const auto hist = dist::build_histogram(samples, dist::BinningSpec::fixed_width(1.0));
  REQUIRE(hist.bin_edges == std::vector<double>{0.0, 1.0, 2.0});
  CHECK(hist.densities[0] == doctest::Approx(0.5));
  CHECK(hist.densities[1] == doctest::Approx(0.5));
  CHECK(hist.counts[0] == 2.0);
  CHECK(hist.counts[1] == 2.0);
}

TEST_CASE("histograms are normalized for every binning") {
  Rng rng(31);
  SampleSet samples;
  for (int i = 0; i < 5000; ++i) samples.values.push_back(rng.exponential(0.05));
  SampleSet weighted = samples;
  weighted.weights.assign(weighted.size(), 0.0);
  for (auto& w : weighted.weights) w = 1.0 + rng.unit_co() * 9.0;

  for (const auto& spec :
       {dist::BinningSpec::automatic(), dist::BinningSpec::fixed_width(3.0),
        dist::BinningSpec::log_bins(20)}) {
    CHECK(binned_mass(dist::build_histogram(samples, spec)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(binned_mass(dist::build_histogram(weighted, spec)) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("auto-binned exponential draws track the closed-form pdf") {
  const double lambda = 1.34e-4;
  Rng rng(12);
  SampleSet samples;
  samples.values.reserve(1'000'000);
  for (int i = 0; i < 1'000'000; ++i) samples.values.push_back(rng.exponential(lambda));

  const auto hist = dist::build_histogram(samples, dist::BinningSpec::automatic());

  // Log-density is linear in x with slope -lambda.
  std::vector<double> centers, log_density;
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    if (hist.densities[i] <= 0.0 || hist.counts[i] < 100.0) continue;
    centers.push_back(hist.bin_center(i));
    log_density.push_back(std::log(hist.densities[i]));
  }
  const auto reg = stats::linear_regression(centers, log_density);
  CHECK(std::abs(-reg.slope - lambda) / lambda < 0.02);

  // Against the closed-form pdf at bin centers: deviations stay inside a
  // counting-noise envelope on populated bins, and under 5% on bins with
  // enough mass that the envelope is tighter than that.
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    if (hist.counts[i] < 100.0) continue;
    const double pdf = lambda * std::exp(-lambda * hist.bin_center(i));
    const double rel = std::abs(hist.densities[i] / pdf - 1.0);
    CHECK(rel < 4.0 / std::sqrt(hist.counts[i]));
    if (hist.counts[i] >= 5000.0) CHECK(rel < 0.05);
  }
}

TEST_CASE("log binning spans the positive values") {
  SampleSet samples;
  samples.values = {0.0, 1.0, 10.0, 100.0, 1000.0};
  const auto hist = dist::build_histogram(samples, dist::BinningSpec::log_bins(6));
  CHECK(hist.bin_edges.front() == doctest::Approx(1.0));
  CHECK(hist.bin_edges.back() == doctest::Approx(1000.0));
  // The zero value is out of range; the binned mass still normalizes.
  CHECK(hist.total_weight == doctest::Approx(4.0));
  CHECK(binned_mass(hist) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate inputs are rejected") {
  SampleSet empty;
  CHECK_THROWS_AS(dist::build_histogram(empty, dist::BinningSpec::automatic()), DataError);

  SampleSet single;
  single.values = {1.0};
  CHECK_THROWS_AS(dist::build_histogram(single, dist::BinningSpec::automatic()), DataError);

  SampleSet constant;
  constant.values = {2.0, 2.0, 2.0};
  CHECK_THROWS_AS(dist::build_histogram(constant, dist::BinningSpec::automatic()), DataError);
}

TEST_CASE("auto width is clamped to one unit for integer data") {
  Rng rng(8);
  SampleSet samples;
  for (int i = 0; i < 100000; ++i)
    samples.values.push_back(std::floor(rng.exponential(1.0)));
  const auto hist = dist::build_histogram(samples, dist::BinningSpec::automatic());
  CHECK(hist.bin_width(0) >= 1.0);
  CHECK(hist.bin_width(0) == std::floor(hist.bin_width(0)));
}

TEST_CASE("weights act as frequency multipliers") {
  SampleSet weighted;
  weighted.values = {1.0, 2.0};
  weighted.weights = {3.0, 1.0};
  SampleSet expanded;
  expanded.values = {1.0, 1.0, 1.0, 2.0};
  const auto a = dist::build_histogram(weighted, dist::BinningSpec::fixed_width(1.0));
  const auto b = dist::build_histogram(expanded, dist::BinningSpec::fixed_width(1.0));
  REQUIRE(a.bin_edges == b.bin_edges);
  for (std::size_t i = 0; i < a.bin_count(); ++i) {
    CHECK(a.counts[i] == doctest::Approx(b.counts[i]));
    CHECK(a.densities[i] == doctest::Approx(b.densities[i]));
  }
}

TEST_CASE("binning specs parse and render") {
  CHECK(dist::BinningSpec::parse("auto").kind == dist::BinningSpec::Kind::Auto);
  CHECK(dist::BinningSpec::parse("fixed:2.5").width == doctest::Approx(2.5));
  CHECK(dist::BinningSpec::parse("log:12").n_bins == 12);
  CHECK_THROWS_AS(dist::BinningSpec::parse("nope"), ConfigError);
  CHECK_THROWS_AS(dist::BinningSpec::parse("fixed:-1"), ConfigError);
  CHECK_THROWS_AS(dist::BinningSpec::parse("log:1"), ConfigError);
}
