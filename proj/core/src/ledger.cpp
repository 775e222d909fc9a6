#include "velo/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "velo/errors.hpp"
#include "velo/rng.hpp"

namespace velo::ledger {

using nlohmann::json;

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

// Civil calendar conversions (proleptic Gregorian, UTC).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void civil_from_timestamp(std::int64_t ts, int& y, int& m, int& d) {
  civil_from_days(floor_div(ts, kSecondsPerDay), y, m, d);
}

std::int64_t month_start_ts(int y, int m) { return days_from_civil(y, m, 1) * kSecondsPerDay; }

std::int64_t next_month_start_ts(std::int64_t ts) {
  int y, m, d;
  civil_from_timestamp(ts, y, m, d);
  if (++m > 12) {
    m = 1;
    ++y;
  }
  return month_start_ts(y, m);
}

}  // namespace

std::string month_label(std::int64_t timestamp) {
  int y, m, d;
  civil_from_timestamp(timestamp, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", y, m);
  return buf;
}

std::string day_label(std::int64_t timestamp) {
  int y, m, d;
  civil_from_timestamp(timestamp, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::string PeriodSpec::label(std::int64_t timestamp) const {
  switch (kind) {
    case Kind::Month:
      return month_label(timestamp);
    case Kind::Day:
      return day_label(timestamp);
    case Kind::Custom:
      return "t" + std::to_string(period_start(timestamp));
  }
  return {};
}

std::int64_t PeriodSpec::period_start(std::int64_t timestamp) const {
  switch (kind) {
    case Kind::Month: {
      int y, m, d;
      civil_from_timestamp(timestamp, y, m, d);
      return month_start_ts(y, m);
    }
    case Kind::Day:
      return floor_div(timestamp, kSecondsPerDay) * kSecondsPerDay;
    case Kind::Custom: {
      if (custom_seconds <= 0) throw ConfigError("custom period length must be positive");
      return custom_origin +
             floor_div(timestamp - custom_origin, custom_seconds) * custom_seconds;
    }
  }
  return 0;
}

std::int64_t PeriodSpec::period_length(std::int64_t timestamp) const {
  switch (kind) {
    case Kind::Month: {
      const std::int64_t start = period_start(timestamp);
      return next_month_start_ts(start) - start;
    }
    case Kind::Day:
      return kSecondsPerDay;
    case Kind::Custom:
      return custom_seconds;
  }
  return 0;
}

std::string validate_tx(const LedgerTx& tx) {
  if (tx.tx_id.empty()) return "missing tx_id";
  if (tx.inputs.empty()) return "transaction has no inputs";
  std::int64_t in_sum = 0, out_sum = 0;
  for (const auto& in : tx.inputs) {
    if (in.amount <= 0) return "input amount must be positive";
    if (in.created_at > tx.timestamp) return "input created_at is after the spend timestamp";
    in_sum += in.amount;
  }
  for (const auto& out : tx.outputs) {
    if (out.amount <= 0) return "output amount must be positive";
    out_sum += out.amount;
  }
  if (out_sum > in_sum) return "outputs exceed inputs";
  return {};
}

namespace {

LedgerTx tx_from_json(const json& j) {
  if (!j.is_object()) throw DataError("transaction is not a JSON object");
  LedgerTx tx;
  if (!j.contains("tx_id") || !j["tx_id"].is_string()) throw DataError("missing string tx_id");
  tx.tx_id = j["tx_id"].get<std::string>();
  if (!j.contains("timestamp") || !j["timestamp"].is_number_integer())
    throw DataError("missing integer timestamp");
  tx.timestamp = j["timestamp"].get<std::int64_t>();
  if (!j.contains("inputs") || !j["inputs"].is_array()) throw DataError("missing inputs array");
  for (const auto& in : j["inputs"]) {
    if (!in.is_object() || !in.contains("amount") || !in["amount"].is_number_integer() ||
        !in.contains("created_at") || !in["created_at"].is_number_integer())
      throw DataError("input needs integer amount and created_at");
    tx.inputs.push_back({in["amount"].get<std::int64_t>(), in["created_at"].get<std::int64_t>()});
  }
  if (!j.contains("outputs") || !j["outputs"].is_array())
    throw DataError("missing outputs array");
  for (const auto& out : j["outputs"]) {
    if (!out.is_object() || !out.contains("amount") || !out["amount"].is_number_integer())
      throw DataError("output needs an integer amount");
    tx.outputs.push_back({out["amount"].get<std::int64_t>()});
  }
  return tx;
}

constexpr std::size_t kMaxStoredErrors = 100;

}  // namespace

ParseStats parse_ledger(std::istream& in, const ParseOptions& options,
                        const std::function<void(LedgerTx&&)>& sink) {
  ParseStats stats;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++stats.lines;
    std::string error;
    try {
      const json j = json::parse(line);
      LedgerTx tx = tx_from_json(j);
      error = validate_tx(tx);
      if (error.empty()) {
        ++stats.parsed;
        sink(std::move(tx));
        continue;
      }
    } catch (const json::exception& e) {
      error = e.what();
    } catch (const DataError& e) {
      error = e.what();
    }
    if (options.strict) throw LedgerParseError(line_no, error);
    ++stats.skipped;
    if (stats.errors.size() < kMaxStoredErrors) stats.errors.emplace_back(line_no, error);
  }
  return stats;
}

std::vector<LedgerTx> read_ledger(std::istream& in, const ParseOptions& options,
                                  ParseStats* stats) {
  std::vector<LedgerTx> txs;
  ParseStats s = parse_ledger(in, options, [&](LedgerTx&& tx) { txs.push_back(std::move(tx)); });
  if (stats) *stats = s;
  return txs;
}

void write_ledger_jsonl(std::ostream& out, std::span<const LedgerTx> txs) {
  for (const auto& tx : txs) {
    json j;
    j["tx_id"] = tx.tx_id;
    j["timestamp"] = tx.timestamp;
    j["inputs"] = json::array();
    for (const auto& in : tx.inputs)
      j["inputs"].push_back({{"amount", in.amount}, {"created_at", in.created_at}});
    j["outputs"] = json::array();
    for (const auto& o : tx.outputs) j["outputs"].push_back({{"amount", o.amount}});
    out << j.dump() << '\n';
  }
}

std::vector<PeriodBucket> holding_times_by_period(std::span<const LedgerTx> txs,
                                                  const PeriodSpec& period) {
  std::map<std::int64_t, PeriodBucket> buckets;
  for (const auto& tx : txs) {
    const std::int64_t start = period.period_start(tx.timestamp);
    auto [it, inserted] = buckets.try_emplace(start);
    PeriodBucket& bucket = it->second;
    if (inserted) {
      bucket.label = period.label(tx.timestamp);
      bucket.start_ts = start;
      bucket.length_seconds = period.period_length(tx.timestamp);
      bucket.holding.time_unit = "second";
    }
    for (const auto& in : tx.inputs) {
      bucket.holding.values.push_back(static_cast<double>(tx.timestamp - in.created_at));
      bucket.holding.weights.push_back(static_cast<double>(in.amount));
      bucket.volume += in.amount;
      ++bucket.n_inputs;
    }
  }
  std::vector<PeriodBucket> out;
  out.reserve(buckets.size());
  for (auto& [start, bucket] : buckets) out.push_back(std::move(bucket));
  return out;
}

PeriodReport period_report(const std::string& label, const SampleSet& holding,
                           std::int64_t volume, double supply, double period_length,
                           const PeriodFitConfig& fit_config) {
  if (holding.empty()) throw DataError("empty period bucket");
  if (!(supply > 0.0)) throw ConfigError("period supply must be positive");
  if (!(period_length > 0.0)) throw ConfigError("period length must be positive");

  PeriodReport report;
  report.period = label;
  report.volume = volume;
  report.supply = supply;
  report.period_length = period_length;
  report.n_samples = holding.size();
  report.ground_truth_velocity =
      velocity::ground_truth(static_cast<double>(volume), supply, period_length);

  report.histogram = dist::build_histogram(holding, fit_config.binning);
  const double xmin = fit_config.xmin > 0.0 ? fit_config.xmin
                                            : dist::default_powerlaw_xmin(report.histogram);
  report.fit = dist::fit_powerlaw_loglog(report.histogram, xmin, fit_config.min_bin_count);
  report.degenerate_fit = report.fit.degenerate;
  report.regression_velocity = velocity::from_exponent(report.fit);
  return report;
}

AuditReport audit_ledger(std::span<const LedgerTx> txs) {
  AuditReport report;
  if (txs.empty()) return report;
  const std::int64_t first_ts = txs.front().timestamp;
  std::multiset<std::pair<std::int64_t, std::int64_t>> pool;  // (created_at, amount)
  for (const auto& tx : txs) {
    for (const auto& in : tx.inputs) {
      const auto key = std::make_pair(in.created_at, in.amount);
      auto it = pool.find(key);
      if (it != pool.end()) {
        pool.erase(it);
        ++report.matched;
      } else if (in.created_at < first_ts) {
        ++report.external;
      } else {
        ++report.unmatched;
      }
    }
    for (const auto& out : tx.outputs) pool.emplace(tx.timestamp, out.amount);
  }
  return report;
}

void SyntheticConfig::validate() const {
  if (n_coins == 0) throw ConfigError("synthetic ledger needs at least one coin");
  if (supply <= 0) throw ConfigError("synthetic supply must be positive");
  if (static_cast<std::uint64_t>(supply) < n_coins)
    throw ConfigError("synthetic supply must cover at least one unit per coin");
  if (duration_days < 0.0) throw ConfigError("synthetic duration must be non-negative");
  if (mode == Mode::Exponential) {
    if (monthly_rates.empty() && !(rate_per_day > 0.0))
      throw ConfigError("synthetic respend rate must be positive");
    for (double r : monthly_rates)
      if (!(r > 0.0)) throw ConfigError("monthly rates must be positive");
  } else {
    if (monthly_exponents.empty() && !(heavy_tail_exponent > 1.0))
      throw ConfigError("heavy-tail pdf exponent must exceed 1");
    for (double a : monthly_exponents)
      if (!(a > 1.0)) throw ConfigError("monthly heavy-tail exponents must exceed 1");
    if (!(heavy_tail_xmin_days > 0.0))
      throw ConfigError("heavy-tail minimum interval must be positive");
  }
}

namespace {

/// Per-calendar-month value lookup, indexed from the month containing
/// start_ts; the last entry extends indefinitely.
double monthly_value_at(std::span<const double> values, std::int64_t start_ts,
                        std::int64_t ts) {
  std::size_t index = 0;
  std::int64_t cursor = PeriodSpec::month().period_start(start_ts);
  while (true) {
    const std::int64_t next = next_month_start_ts(cursor);
    if (ts < next || index + 1 >= values.size()) break;
    cursor = next;
    ++index;
  }
  return values[index];
}

double rate_at(const SyntheticConfig& config, std::int64_t ts) {
  if (config.monthly_rates.empty()) return config.rate_per_day;
  return monthly_value_at(config.monthly_rates, config.start_ts, ts);
}

/// Next event time for an exponential clock with month-dependent rate,
/// consuming a unit-mean exponential deviate across rate segments.
double next_exponential_event(const SyntheticConfig& config, double t_seconds, Rng& rng) {
  double remaining = -std::log(rng.unit_oc());  // hazard to consume
  double t = t_seconds;
  while (true) {
    const double rate_per_second =
        rate_at(config, static_cast<std::int64_t>(std::floor(t))) / kSecondsPerDay;
    const std::int64_t boundary =
        next_month_start_ts(static_cast<std::int64_t>(std::floor(t)));
    const double span = static_cast<double>(boundary) - t;
    const double hazard_in_segment = rate_per_second * span;
    if (remaining <= hazard_in_segment) return t + remaining / rate_per_second;
    remaining -= hazard_in_segment;
    t = static_cast<double>(boundary);
  }
}

}  // namespace

std::vector<LedgerTx> generate_synthetic_ledger(const SyntheticConfig& config) {
  config.validate();
  std::vector<LedgerTx> txs;
  const double end_seconds = static_cast<double>(config.start_ts) +
                             config.duration_days * static_cast<double>(kSecondsPerDay);
  const std::int64_t base_amount = config.supply / static_cast<std::int64_t>(config.n_coins);
  const std::int64_t remainder = config.supply % static_cast<std::int64_t>(config.n_coins);

  for (std::uint64_t coin = 0; coin < config.n_coins; ++coin) {
    Rng rng(derive_seed(config.rng_seed, coin));
    const std::int64_t amount =
        base_amount + (static_cast<std::int64_t>(coin) < remainder ? 1 : 0);
    double t = static_cast<double>(config.start_ts);
    std::int64_t prev_ts = config.start_ts;
    std::uint64_t spend_no = 0;
    while (true) {
      if (config.mode == SyntheticConfig::Mode::Exponential) {
        t = next_exponential_event(config, t, rng);
      } else {
        // The interval is drawn from the exponent of the month in which the
        // spend is initiated.
        const double exponent =
            config.monthly_exponents.empty()
                ? config.heavy_tail_exponent
                : monthly_value_at(config.monthly_exponents, config.start_ts,
                                   static_cast<std::int64_t>(std::floor(t)));
        t += rng.pareto(config.heavy_tail_xmin_days, exponent) *
             static_cast<double>(kSecondsPerDay);
      }
      if (t >= end_seconds) break;
      const auto ts = static_cast<std::int64_t>(std::floor(t));
      LedgerTx tx;
      tx.tx_id = "c" + std::to_string(coin) + "-" + std::to_string(spend_no++);
      tx.timestamp = ts;
      tx.inputs.push_back({amount, prev_ts});
      tx.outputs.push_back({amount});
      txs.push_back(std::move(tx));
      prev_ts = ts;
    }
  }

  std::sort(txs.begin(), txs.end(), [](const LedgerTx& a, const LedgerTx& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.tx_id < b.tx_id;
  });
  return txs;
}

}  // namespace velo::ledger
