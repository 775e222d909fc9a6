#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "velo/errors.hpp"
#include "velo/io.hpp"
#include "velo/rng.hpp"

using namespace velo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("velo_io_test_" + std::to_string(Rng(std::random_device{}()).next()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("samples survive a csv round trip, weighted or not") {
  TempDir dir;
  Rng rng(77);
  SampleSet samples;
  for (int i = 0; i < 500; ++i) samples.values.push_back(rng.exponential(0.3));

  const auto plain = dir.path / "plain.csv";
  io::write_samples_csv(plain, samples, "age");
  const auto back = io::read_samples_csv(plain);
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(samples.values[i]).epsilon(1e-11));

  samples.weights.assign(samples.size(), 0.0);
  for (auto& w : samples.weights) w = 1.0 + rng.unit_co();
  const auto weighted = dir.path / "weighted.csv";
  io::write_samples_csv(weighted, samples, "lifespan");
  const auto weighted_back = io::read_samples_csv(weighted);
  REQUIRE(weighted_back.weighted());
  CHECK(weighted_back.weights.size() == samples.size());
}

TEST_CASE("reading an empty csv fails loudly") {
  TempDir dir;
  const auto path = dir.path / "empty.csv";
  std::ofstream(path) << "age\n";
  CHECK_THROWS_AS(io::read_samples_csv(path), DataError);
  CHECK_THROWS_AS(io::read_samples_csv(dir.path / "missing.csv"), DataError);
}

TEST_CASE("fit documents round trip through json") {
  TempDir dir;
  dist::ExponentialFit fit;
  fit.rate = 0.0123;
  fit.intercept = 0.0125;
  fit.r_squared = 0.993;
  fit.method = dist::FitMethod::LogLinear;
  const auto exp_path = dir.path / "exp.json";
  io::write_text_file(exp_path, io::exponential_fit_json(fit));
  const auto exp_doc = io::read_fit_json(exp_path);
  REQUIRE(exp_doc.kind == io::FitDocument::Kind::Exponential);
  CHECK(exp_doc.exponential.rate == doctest::Approx(fit.rate).epsilon(1e-12));
  CHECK(exp_doc.exponential.intercept == doctest::Approx(fit.intercept).epsilon(1e-12));
  CHECK(exp_doc.exponential.method == dist::FitMethod::LogLinear);

  dist::PowerLawFit power;
  power.exponent = 1.62;
  power.prefactor = 0.4;
  power.xmin = 2.0;
  power.r_squared = 0.88;
  const auto pow_path = dir.path / "pow.json";
  io::write_text_file(pow_path, io::powerlaw_fit_json(power));
  const auto pow_doc = io::read_fit_json(pow_path);
  REQUIRE(pow_doc.kind == io::FitDocument::Kind::PowerLaw);
  CHECK(pow_doc.power_law.exponent == doctest::Approx(power.exponent).epsilon(1e-12));
  CHECK(pow_doc.power_law.xmin == doctest::Approx(2.0));

  std::ofstream(dir.path / "bad.json") << "{\"kind\": \"mystery\"}";
  CHECK_THROWS_AS(io::read_fit_json(dir.path / "bad.json"), DataError);
}

TEST_CASE("format_double prints twelve significant digits") {
  CHECK(io::format_double(0.25) == "0.25");
  CHECK(io::format_double(25) == "25");
  const double value = 1.0 / 3.0;
  const double parsed = std::stod(io::format_double(value));
  CHECK(std::abs(parsed - value) <= 1e-12 * value);
}

TEST_CASE("study results mirror to json") {
  velo::study::StudyResult result;
  result.baseline.value = 0.01;
  result.rows.push_back({0.1, 0.0099, 0.0002, 1000});
  const auto parsed = nlohmann::json::parse(io::study_json(result));
  CHECK(parsed["baseline"]["value"].get<double>() == doctest::Approx(0.01));
  REQUIRE(parsed["rows"].size() == 1);
  CHECK(parsed["rows"][0]["ratio"].get<double>() == doctest::Approx(0.1));
  CHECK(parsed["rows"][0]["n_samples"] == 1000);
}

TEST_CASE("entropy csv uses the documented header") {
  TempDir dir;
  std::vector<sim::EntropyPoint> trace{{0, 0.0}, {10, 1.5}};
  const auto path = dir.path / "entropy.csv";
  io::write_entropy_csv(path, trace);
  std::ifstream in(path);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "tick,entropy");
  CHECK(first == "0,0");
}
