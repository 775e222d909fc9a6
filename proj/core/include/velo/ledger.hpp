#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "velo/fits.hpp"
#include "velo/sample_set.hpp"
#include "velo/velocity.hpp"

namespace velo::ledger {

struct TxInput {
  std::int64_t amount = 0;      // currency units, > 0
  std::int64_t created_at = 0;  // seconds since epoch; <= containing timestamp
};

struct TxOutput {
  std::int64_t amount = 0;  // > 0
};

/// One UTXO-style transaction: spent inputs self-report their creation time,
/// so holding times need no output-graph reconstruction.
struct LedgerTx {
  std::string tx_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  std::vector<TxInput> inputs;
  std::vector<TxOutput> outputs;
};

/// Schema validation; returns an empty string when the transaction is valid.
std::string validate_tx(const LedgerTx& tx);

struct ParseOptions {
  bool strict = true;  // strict: throw LedgerParseError; lenient: skip and count
};

struct ParseStats {
  std::uint64_t lines = 0;
  std::uint64_t parsed = 0;
  std::uint64_t skipped = 0;
  std::vector<std::pair<std::uint64_t, std::string>> errors;  // first reported errors
};

/// Streams a JSON-lines ledger, invoking sink for each valid transaction in
/// input order. Bounded memory: one line is resident at a time.
ParseStats parse_ledger(std::istream& in, const ParseOptions& options,
                        const std::function<void(LedgerTx&&)>& sink);

/// Convenience wrapper collecting all transactions.
std::vector<LedgerTx> read_ledger(std::istream& in, const ParseOptions& options,
                                  ParseStats* stats = nullptr);

void write_ledger_jsonl(std::ostream& out, std::span<const LedgerTx> txs);

struct PeriodSpec {
  enum class Kind { Month, Day, Custom };
  Kind kind = Kind::Month;
  std::int64_t custom_seconds = 86400;
  std::int64_t custom_origin = 0;

  static PeriodSpec month() { return {Kind::Month, 0, 0}; }
  static PeriodSpec day() { return {Kind::Day, 0, 0}; }
  static PeriodSpec custom(std::int64_t seconds, std::int64_t origin = 0) {
    return {Kind::Custom, seconds, origin};
  }

  std::string label(std::int64_t timestamp) const;
  std::int64_t period_start(std::int64_t timestamp) const;
  /// Period length in seconds for the period containing timestamp.
  std::int64_t period_length(std::int64_t timestamp) const;
};

struct PeriodBucket {
  std::string label;
  std::int64_t start_ts = 0;
  std::int64_t length_seconds = 0;
  SampleSet holding;          // value = spend age in seconds, weight = amount
  std::int64_t volume = 0;    // exact sum of spent input amounts
  std::uint64_t n_inputs = 0;
};

/// Buckets every spent input by its transaction's period. Each input
/// contributes one (age, weight=amount) sample. Returned sorted by start.
std::vector<PeriodBucket> holding_times_by_period(std::span<const LedgerTx> txs,
                                                  const PeriodSpec& period);

struct PeriodFitConfig {
  dist::BinningSpec binning = dist::BinningSpec::log_bins(24);
  double xmin = 0.0;           // <= 0 selects the default threshold per histogram
  double min_bin_count = 0.0;  // bins below this weighted count are not fitted
};

struct PeriodReport {
  std::string period;
  std::int64_t volume = 0;
  double supply = 0.0;
  double period_length = 0.0;
  std::size_t n_samples = 0;
  velocity::Estimate ground_truth_velocity;
  velocity::Estimate regression_velocity;  // power-law exponent, trend proxy
  dist::PowerLawFit fit;
  dist::Histogram histogram;
  bool degenerate_fit = false;
};

/// Ground-truth velocity volume/(supply*period_length) plus the power-law
/// regression velocity of the bucket's holding-time histogram. period_length
/// and the bucket samples must share a time unit.
PeriodReport period_report(const std::string& label, const SampleSet& holding,
                           std::int64_t volume, double supply, double period_length,
                           const PeriodFitConfig& fit_config);

/// Provenance audit: checks each input's self-reported (created_at, amount)
/// against outputs of earlier transactions. Inputs predating the ledger's
/// first transaction are counted as external.
struct AuditReport {
  std::uint64_t matched = 0;
  std::uint64_t external = 0;
  std::uint64_t unmatched = 0;
};

AuditReport audit_ledger(std::span<const LedgerTx> txs);

struct SyntheticConfig {
  std::uint64_t n_coins = 1000;
  double rate_per_day = 0.1;          // exponential respend rate
  std::vector<double> monthly_rates;  // optional per-calendar-month rates from start_ts
  double duration_days = 90.0;
  std::int64_t supply = 1'000'000;
  std::int64_t start_ts = 1640995200;  // 2022-01-01T00:00:00Z
  std::uint64_t rng_seed = 1;

  enum class Mode { Exponential, HeavyTail };
  Mode mode = Mode::Exponential;
  double heavy_tail_exponent = 1.6;       // pdf exponent of the respend intervals
  double heavy_tail_xmin_days = 0.1;
  std::vector<double> monthly_exponents;  // optional per-calendar-month exponents

  void validate() const;
};

/// Deterministic synthetic ledger: each coin is respent at exponential (or
/// heavy-tail Pareto) intervals, emitting one schema-valid transaction per
/// respend. Transactions are sorted by timestamp. Doubles as the module's
/// test oracle since every rate and exponent is known by construction.
std::vector<LedgerTx> generate_synthetic_ledger(const SyntheticConfig& config);

/// Calendar helpers (UTC).
std::string month_label(std::int64_t timestamp);
std::string day_label(std::int64_t timestamp);

}  // namespace velo::ledger
