#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "velo/rng.hpp"
#include "velo/sample_set.hpp"

namespace velo::sim {

/// How the transfer fraction v in dm = floor(v*(m1+m2)/2) is chosen.
enum class TransferMode { UniformRandom, Fixed };

/// Which physical units leave the sender's holdings when dm units move.
enum class UnitSelection { Random, OldestFirst, NewestFirst };

struct SimConfig {
  std::uint32_t n_agents = 10'000;
  std::uint64_t total_money = 1'000'000;
  TransferMode transfer_mode = TransferMode::UniformRandom;
  double fixed_fraction = 1.0;  // used when transfer_mode == Fixed; in (0, 1]
  UnitSelection unit_selection = UnitSelection::Random;
  std::uint64_t burn_in_iterations = 10'000;
  std::uint64_t measure_iterations = 40'000;
  std::uint64_t entropy_stride = 10;
  std::uint64_t rng_seed = 1;

  std::uint64_t units_per_agent() const { return total_money / n_agents; }

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

struct StepStats {
  std::uint64_t transferred = 0;
  bool skipped = false;
};

struct EntropyPoint {
  std::uint64_t tick = 0;
  double entropy = 0.0;
};

struct RunResult {
  SimConfig config;
  std::uint64_t volume = 0;                 // units moved during the measurement window
  std::uint64_t window = 0;                 // measurement duration in iterations
  std::uint64_t skipped_transactions = 0;   // skips during the measurement window
  SampleSet final_ages;                     // one age per money unit at the final tick
  SampleSet lifespans;                      // gaps recorded during the measurement window
  std::vector<EntropyPoint> entropy_trace;  // spans burn-in and measurement

  double ground_truth_velocity() const {
    return static_cast<double>(volume) /
           (static_cast<double>(config.total_money) * static_cast<double>(window));
  }
};

/// Closed-economy random-exchange simulation over indivisible money units.
/// Every unit carries the tick of its latest transaction, so holding times
/// (ages) and lifespans can be harvested at any point.
///
/// One step: the tick advances, a sender/receiver pair is drawn uniformly
/// without replacement, and dm = floor(v*(m1+m2)/2) units move if the sender
/// can cover them; otherwise the transaction is skipped. Each moved unit emits
/// the gap since its previous transaction and is reborn at the current tick.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);

  /// Advances one iteration. Emitted lifespans are appended to lifespan_sink
  /// when it is non-null.
  StepStats step(Rng& rng, std::vector<std::uint64_t>* lifespan_sink = nullptr);

  std::uint64_t tick() const { return tick_; }
  std::span<const std::uint64_t> balances() const { return balances_; }
  std::span<const std::uint64_t> unit_birth() const { return unit_birth_; }
  std::span<const std::uint32_t> unit_owner() const { return unit_owner_; }

  /// Entropy of the current balance distribution, maintained incrementally.
  double entropy() const;

 private:
  void move_unit(std::uint32_t unit, std::uint32_t from, std::uint32_t to);
  void bump_balance_bin(std::uint64_t balance, std::int64_t delta);

  SimConfig config_;
  std::uint64_t tick_ = 0;
  std::vector<std::uint64_t> balances_;
  std::vector<std::uint64_t> unit_birth_;
  std::vector<std::uint32_t> unit_owner_;
  std::vector<std::vector<std::uint32_t>> pockets_;  // unit ids per agent
  std::vector<std::uint32_t> unit_slot_;             // index of unit in its owner's pocket
  std::vector<std::uint32_t> scratch_;

  // Unit-width occupancy bins over balances and Sum c*ln(c) for O(1) entropy.
  std::vector<std::uint64_t> balance_bins_;
  double occupancy_log_sum_ = 0.0;
};

/// Runs the full burn-in + measurement protocol. Deterministic per seed.
RunResult run(const SimConfig& config);

/// Entropy -Sum p_k ln p_k of the balance histogram on unit-width bins.
double entropy(std::span<const std::uint64_t> balances);

/// True when the means of the last two disjoint windows of the trace differ
/// by less than rel_tol relative to their magnitude.
bool stationarity_reached(std::span<const EntropyPoint> trace, std::size_t window,
                          double rel_tol);

}  // namespace velo::sim
