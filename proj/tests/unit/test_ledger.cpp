#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "velo/errors.hpp"
#include "velo/ledger.hpp"
#include "velo/rng.hpp"
#include "velo/stats.hpp"

using namespace velo;

namespace {

constexpr std::int64_t kJan2022 = 1640995200;  // 2022-01-01T00:00:00Z
constexpr double kDay = 86400.0;

std::string to_jsonl(std::span<const ledger::LedgerTx> txs) {
  std::ostringstream out;
  ledger::write_ledger_jsonl(out, txs);
  return out.str();
}

}  // namespace

TEST_CASE("transaction validation catches every schema violation") {
  ledger::LedgerTx tx;
  tx.tx_id = "t1";
  tx.timestamp = 100;
  tx.inputs = {{7, 40}};
  tx.outputs = {{7}};
  CHECK(ledger::validate_tx(tx).empty());

  ledger::LedgerTx late = tx;
  late.inputs[0].created_at = 200;
  CHECK_FALSE(ledger::validate_tx(late).empty());

  ledger::LedgerTx inflating = tx;
  inflating.outputs[0].amount = 8;
  CHECK_FALSE(ledger::validate_tx(inflating).empty());

  ledger::LedgerTx no_inputs = tx;
  no_inputs.inputs.clear();
  CHECK_FALSE(ledger::validate_tx(no_inputs).empty());

  ledger::LedgerTx non_positive = tx;
  non_positive.inputs[0].amount = 0;
  CHECK_FALSE(ledger::validate_tx(non_positive).empty());

  ledger::LedgerTx fee_paying = tx;  // outputs below inputs are fine
  fee_paying.outputs[0].amount = 5;
  CHECK(ledger::validate_tx(fee_paying).empty());
}

TEST_CASE("an empty stream parses to an empty ledger") {
  std::istringstream in("");
  const auto txs = ledger::read_ledger(in, {});
  CHECK(txs.empty());
}

TEST_CASE("strict parsing names the offending line") {
  const std::string text =
      R"({"tx_id":"a","timestamp":100,"inputs":[{"amount":5,"created_at":40}],"outputs":[{"amount":5}]})"
      "\n"
      R"({"tx_id":"b","timestamp":100,"inputs":[{"amount":5,"created_at":500}],"outputs":[{"amount":5}]})"
      "\n";
  std::istringstream in(text);
  try {
    ledger::read_ledger(in, {});
    FAIL("expected LedgerParseError");
  } catch (const LedgerParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("lenient parsing skips and counts invalid lines") {
  const std::string text =
      "not json at all\n"
      "\n"
      R"({"tx_id":"a","timestamp":100,"inputs":[{"amount":5,"created_at":40}],"outputs":[]})"
      "\n";
  std::istringstream in(text);
  ledger::ParseOptions options;
  options.strict = false;
  ledger::ParseStats stats;
  const auto txs = ledger::read_ledger(in, options, &stats);
  CHECK(txs.size() == 1);
  CHECK(stats.parsed == 1);
  CHECK(stats.skipped == 1);
  REQUIRE(stats.errors.size() == 1);
  CHECK(stats.errors[0].first == 1);
}

TEST_CASE("a generated ledger parses back to the generator's bookkeeping") {
  ledger::SyntheticConfig config;
  config.n_coins = 400;
  config.rate_per_day = 0.3;
  config.duration_days = 90;
  config.supply = 400'000;
  config.rng_seed = 44;
  const auto txs = ledger::generate_synthetic_ledger(config);
  REQUIRE(txs.size() > 5000);

  std::int64_t generated_volume = 0;
  for (const auto& tx : txs)
    for (const auto& input : tx.inputs) generated_volume += input.amount;

  std::istringstream in(to_jsonl(txs));
  const auto parsed = ledger::read_ledger(in, {});
  REQUIRE(parsed.size() == txs.size());
  std::int64_t parsed_volume = 0;
  for (const auto& tx : parsed)
    for (const auto& input : tx.inputs) parsed_volume += input.amount;
  CHECK(parsed_volume == generated_volume);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].tx_id == txs[i].tx_id);
    CHECK(parsed[i].timestamp == txs[i].timestamp);
  }
}

TEST_CASE("spent inputs land in the spend-time bucket with amount weights") {
  ledger::LedgerTx tx;
  tx.tx_id = "t";
  tx.timestamp = 100;
  tx.inputs = {{7, 40}};
  tx.outputs = {{7}};
  const auto buckets =
      ledger::holding_times_by_period(std::vector{tx}, ledger::PeriodSpec::custom(1000));
  REQUIRE(buckets.size() == 1);
  CHECK(buckets[0].holding.values == std::vector<double>{60.0});
  CHECK(buckets[0].holding.weights == std::vector<double>{7.0});
  CHECK(buckets[0].volume == 7);
}

TEST_CASE("an input created long ago lands in the month it was spent") {
  ledger::LedgerTx tx;
  tx.tx_id = "t";
  tx.timestamp = kJan2022 + 70 * 86400;  // mid-March 2022
  tx.inputs = {{10, kJan2022}};          // created in January
  tx.outputs = {{10}};
  const auto buckets =
      ledger::holding_times_by_period(std::vector{tx}, ledger::PeriodSpec::month());
  REQUIRE(buckets.size() == 1);
  CHECK(buckets[0].label == "2022-03");
}

TEST_CASE("calendar helpers agree with the civil calendar") {
  CHECK(ledger::month_label(kJan2022) == "2022-01");
  CHECK(ledger::month_label(kJan2022 - 1) == "2021-12");
  CHECK(ledger::day_label(kJan2022 + 86400) == "2022-01-02");

  const auto month = ledger::PeriodSpec::month();
  CHECK(month.period_length(kJan2022) == 31 * 86400);
  CHECK(month.period_length(kJan2022 + 32 * 86400) == 28 * 86400);  // Feb 2022
  CHECK(month.period_start(kJan2022 + 5) == kJan2022);
}

TEST_CASE("steady respending reproduces the configured rate per month") {
  ledger::SyntheticConfig config;
  config.n_coins = 2000;
  config.rate_per_day = 0.1;
  config.duration_days = 90;
  config.supply = 2'000'000;
  config.rng_seed = 5;
  const auto txs = ledger::generate_synthetic_ledger(config);
  const auto buckets = ledger::holding_times_by_period(txs, ledger::PeriodSpec::month());
  REQUIRE(buckets.size() == 3);
  for (const auto& bucket : buckets) {
    const double days = static_cast<double>(bucket.length_seconds) / kDay;
    const double v_g =
        static_cast<double>(bucket.volume) / (static_cast<double>(config.supply) * days);
    CHECK(velo::testing::rel_err(v_g, 0.1) < 0.10);
  }
}

TEST_CASE("poisson respending yields exponential spend ages") {
  // Month three of a long window: the process is effectively stationary.
  ledger::SyntheticConfig config;
  config.n_coins = 40'000;
  config.rate_per_day = 0.1;
  config.duration_days = 90;
  config.supply = 40'000'000;
  config.rng_seed = 8;
  const auto txs = ledger::generate_synthetic_ledger(config);
  const auto buckets = ledger::holding_times_by_period(txs, ledger::PeriodSpec::month());
  REQUIRE(buckets.size() == 3);

  std::vector<double> ages;
  for (double v : buckets.back().holding.values) ages.push_back(v / kDay);
  std::sort(ages.begin(), ages.end());
  double ks = 0.0;
  const double n = static_cast<double>(ages.size());
  for (std::size_t i = 0; i < ages.size(); ++i) {
    const double model = 1.0 - std::exp(-0.1 * ages[i]);
    ks = std::max(ks, std::abs(model - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(model - static_cast<double>(i + 1) / n));
  }
  CHECK(ages.size() > 100'000);
  CHECK(ks < 0.02);
}

TEST_CASE("period report combines ground truth and regression velocity") {
  SampleSet holding;
  holding.time_unit = "day";
  Rng rng(42);
  for (int i = 0; i < 200'000; ++i) holding.values.push_back(rng.pareto(1.0, 1.5));
  holding.weights.assign(holding.size(), 1.0);

  ledger::PeriodFitConfig fit_config;
  fit_config.binning = dist::BinningSpec::log_bins(32);
  fit_config.xmin = 1.0;
  fit_config.min_bin_count = 5.0;

  const auto report = ledger::period_report("2022-01", holding, 500, 500.0, 1.0, fit_config);
  CHECK(report.ground_truth_velocity.value == doctest::Approx(1.0));
  CHECK(std::abs(report.regression_velocity.value - 1.5) < 0.05);
  CHECK(report.regression_velocity.method.trend_proxy);
  CHECK_FALSE(report.degenerate_fit);
  CHECK(report.n_samples == holding.size());
}

TEST_CASE("period report flags degenerate fits and rejects empty buckets") {
  SampleSet rising;
  rising.time_unit = "day";
  for (int i = 0; i < 5000; ++i) rising.values.push_back(900.0 + (i % 100));
  ledger::PeriodFitConfig fit_config;
  fit_config.binning = dist::BinningSpec::log_bins(8);
  fit_config.xmin = 1.0;
  const auto report = ledger::period_report("p", rising, 10, 10.0, 1.0, fit_config);
  CHECK(report.degenerate_fit);

  SampleSet empty;
  CHECK_THROWS_AS(ledger::period_report("p", empty, 1, 1.0, 1.0, fit_config), DataError);
  CHECK_THROWS_AS(ledger::period_report("p", rising, 1, 0.0, 1.0, fit_config), ConfigError);
}

TEST_CASE("scaling amounts and supply together leaves velocity unchanged") {
  SampleSet holding;
  holding.time_unit = "day";
  Rng rng(9);
  for (int i = 0; i < 50'000; ++i) holding.values.push_back(rng.pareto(1.0, 1.7));
  holding.weights.assign(holding.size(), 1.0);
  SampleSet doubled = holding;
  for (auto& w : doubled.weights) w *= 2.0;

  ledger::PeriodFitConfig fit_config;
  fit_config.binning = dist::BinningSpec::log_bins(24);
  fit_config.xmin = 1.0;
  const auto base = ledger::period_report("p", holding, 1000, 500.0, 2.0, fit_config);
  const auto scaled = ledger::period_report("p", doubled, 2000, 1000.0, 2.0, fit_config);
  CHECK(scaled.ground_truth_velocity.value ==
        doctest::Approx(base.ground_truth_velocity.value).epsilon(1e-12));
  CHECK(scaled.regression_velocity.value ==
        doctest::Approx(base.regression_velocity.value).epsilon(1e-9));
}

TEST_CASE("heavy-tail generation recovers the interval exponent") {
  ledger::SyntheticConfig config;
  config.n_coins = 3000;
  config.mode = ledger::SyntheticConfig::Mode::HeavyTail;
  config.heavy_tail_exponent = 1.6;
  config.heavy_tail_xmin_days = 0.1;
  config.duration_days = 90;
  config.supply = 3'000'000;
  config.rng_seed = 7;
  const auto txs = ledger::generate_synthetic_ledger(config);
  const auto buckets = ledger::holding_times_by_period(txs, ledger::PeriodSpec::month());
  REQUIRE(buckets.size() == 3);

  ledger::PeriodFitConfig fit_config;
  fit_config.xmin = 0.1;
  for (std::size_t i = 1; i < buckets.size(); ++i) {  // month one mixes the creation burst
    SampleSet scaled = buckets[i].holding;
    scaled.time_unit = "day";
    for (auto& v : scaled.values) v /= kDay;
    const double days = static_cast<double>(buckets[i].length_seconds) / kDay;
    const auto report = ledger::period_report(buckets[i].label, scaled, buckets[i].volume,
                                              static_cast<double>(config.supply), days,
                                              fit_config);
    CHECK(std::abs(report.fit.exponent - 1.6) < 0.1);
  }
}

TEST_CASE("month-varying spend rates rank the same by either velocity") {
  ledger::SyntheticConfig config;
  config.n_coins = 3000;
  config.mode = ledger::SyntheticConfig::Mode::HeavyTail;
  config.heavy_tail_xmin_days = 0.05;
  config.monthly_exponents = {1.9, 1.5, 2.2, 1.7, 1.4, 2.0, 1.6, 2.4, 1.8};
  config.duration_days = 273;
  config.supply = 3'000'000;
  config.rng_seed = 17;
  const auto txs = ledger::generate_synthetic_ledger(config);
  const auto buckets = ledger::holding_times_by_period(txs, ledger::PeriodSpec::month());
  REQUIRE(buckets.size() >= 7);

  ledger::PeriodFitConfig fit_config;
  fit_config.xmin = config.heavy_tail_xmin_days;
  std::vector<double> ground_truth, regression;
  for (std::size_t i = 1; i < buckets.size(); ++i) {
    SampleSet scaled = buckets[i].holding;
    scaled.time_unit = "day";
    for (auto& v : scaled.values) v /= kDay;
    const double days = static_cast<double>(buckets[i].length_seconds) / kDay;
    const auto report = ledger::period_report(buckets[i].label, scaled, buckets[i].volume,
                                              static_cast<double>(config.supply), days,
                                              fit_config);
    ground_truth.push_back(report.ground_truth_velocity.value);
    regression.push_back(report.regression_velocity.value);
  }
  CHECK(stats::spearman(ground_truth, regression) > 0.8);
}

TEST_CASE("ledger generation is deterministic and conserves volume per period") {
  ledger::SyntheticConfig config;
  config.n_coins = 100;
  config.rate_per_day = 0.2;
  config.duration_days = 45;
  config.supply = 100'000;
  config.rng_seed = 3;
  const auto a = ledger::generate_synthetic_ledger(config);
  const auto b = ledger::generate_synthetic_ledger(config);
  CHECK(to_jsonl(a) == to_jsonl(b));

  std::int64_t total = 0;
  for (const auto& tx : a)
    for (const auto& input : tx.inputs) total += input.amount;
  std::int64_t bucketed = 0;
  for (const auto& bucket : ledger::holding_times_by_period(a, ledger::PeriodSpec::month()))
    bucketed += bucket.volume;
  CHECK(bucketed == total);
}

TEST_CASE("zero duration produces an empty ledger") {
  ledger::SyntheticConfig config;
  config.duration_days = 0.0;
  CHECK(ledger::generate_synthetic_ledger(config).empty());
}

TEST_CASE("the audit pass matches respends and counts genesis coins as external") {
  ledger::SyntheticConfig config;
  config.n_coins = 50;
  config.rate_per_day = 0.3;
  config.duration_days = 60;
  config.supply = 50'000;
  config.rng_seed = 21;
  const auto txs = ledger::generate_synthetic_ledger(config);
  const auto report = ledger::audit_ledger(txs);
  CHECK(report.unmatched == 0);
  CHECK(report.external <= config.n_coins);
  CHECK(report.matched + report.external > 0);

  // A spoofed creation time has no matching prior output.
  auto tampered = txs;
  tampered.back().inputs[0].created_at += 1;
  const auto tampered_report = ledger::audit_ledger(tampered);
  CHECK(tampered_report.unmatched == 1);
}

TEST_CASE("synthetic config validation") {
  ledger::SyntheticConfig config;
  config.n_coins = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.n_coins = 10;
  config.supply = 5;  // fewer units than coins
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.supply = 1000;
  config.rate_per_day = -1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.rate_per_day = 0.1;
  config.mode = ledger::SyntheticConfig::Mode::HeavyTail;
  config.heavy_tail_exponent = 0.9;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
