#include "velo/exchange_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "velo/errors.hpp"

namespace velo::sim {

void SimConfig::validate() const {
  if (n_agents < 2) throw ConfigError("n_agents must be at least 2");
  if (total_money == 0) throw ConfigError("total_money must be positive");
  if (total_money % n_agents != 0)
    throw ConfigError("total_money must be divisible by n_agents");
  if (total_money > std::numeric_limits<std::uint32_t>::max())
    throw ConfigError("total_money exceeds the per-unit tracking limit (2^32 - 1)");
  if (measure_iterations < 1) throw ConfigError("measure_iterations must be at least 1");
  if (transfer_mode == TransferMode::Fixed &&
      !(fixed_fraction > 0.0 && fixed_fraction <= 1.0))
    throw ConfigError("fixed transfer fraction must lie in (0, 1]");
  if (entropy_stride < 1) throw ConfigError("entropy_stride must be at least 1");
}

Simulation::Simulation(const SimConfig& config) : config_(config) {
  config_.validate();
  const std::uint32_t n = config_.n_agents;
  const std::uint64_t m = config_.total_money;
  const std::uint64_t per_agent = config_.units_per_agent();

  balances_.assign(n, per_agent);
  unit_birth_.assign(m, 0);
  unit_owner_.resize(m);
  unit_slot_.resize(m);
  pockets_.resize(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    pockets_[a].reserve(per_agent);
    for (std::uint64_t k = 0; k < per_agent; ++k) {
      const std::uint32_t unit = static_cast<std::uint32_t>(a * per_agent + k);
      pockets_[a].push_back(unit);
      unit_owner_[unit] = a;
      unit_slot_[unit] = static_cast<std::uint32_t>(k);
    }
  }

  balance_bins_.assign(per_agent + 1, 0);
  balance_bins_[per_agent] = n;
  occupancy_log_sum_ = static_cast<double>(n) * std::log(static_cast<double>(n));
}

void Simulation::bump_balance_bin(std::uint64_t balance, std::int64_t delta) {
  if (balance >= balance_bins_.size()) balance_bins_.resize(balance + 1, 0);
  std::uint64_t& c = balance_bins_[balance];
  if (c > 1) occupancy_log_sum_ -= static_cast<double>(c) * std::log(static_cast<double>(c));
  c = static_cast<std::uint64_t>(static_cast<std::int64_t>(c) + delta);
  if (c > 1) occupancy_log_sum_ += static_cast<double>(c) * std::log(static_cast<double>(c));
}

double Simulation::entropy() const {
  const double n = static_cast<double>(config_.n_agents);
  return std::log(n) - occupancy_log_sum_ / n;
}

void Simulation::move_unit(std::uint32_t unit, std::uint32_t from, std::uint32_t to) {
  auto& src = pockets_[from];
  const std::uint32_t slot = unit_slot_[unit];
  const std::uint32_t last = src.back();
  src[slot] = last;
  unit_slot_[last] = slot;
  src.pop_back();

  pockets_[to].push_back(unit);
  unit_slot_[unit] = static_cast<std::uint32_t>(pockets_[to].size() - 1);
  unit_owner_[unit] = to;
}

StepStats Simulation::step(Rng& rng, std::vector<std::uint64_t>* lifespan_sink) {
  ++tick_;

  const std::uint32_t n = config_.n_agents;
  const std::uint32_t sender = static_cast<std::uint32_t>(rng.below(n));
  std::uint32_t receiver = static_cast<std::uint32_t>(rng.below(n - 1));
  if (receiver >= sender) ++receiver;

  const double v = config_.transfer_mode == TransferMode::Fixed ? config_.fixed_fraction
                                                                : rng.unit_oc();
  const double pooled = static_cast<double>(balances_[sender] + balances_[receiver]);
  const std::uint64_t dm = static_cast<std::uint64_t>(std::floor(0.5 * v * pooled));

  StepStats stats;
  if (dm < 1 || dm > balances_[sender]) {
    stats.skipped = true;
    return stats;
  }

  auto& pocket = pockets_[sender];
  scratch_.clear();
  switch (config_.unit_selection) {
    case UnitSelection::Random: {
      // Partial Fisher-Yates: selected units accumulate at the pocket's tail.
      const std::size_t size = pocket.size();
      for (std::uint64_t k = 0; k < dm; ++k) {
        const std::size_t pick = static_cast<std::size_t>(rng.below(size - k));
        const std::size_t tail = size - 1 - k;
        std::swap(pocket[pick], pocket[tail]);
        unit_slot_[pocket[pick]] = static_cast<std::uint32_t>(pick);
        unit_slot_[pocket[tail]] = static_cast<std::uint32_t>(tail);
        scratch_.push_back(pocket[tail]);
      }
      break;
    }
    case UnitSelection::OldestFirst:
    case UnitSelection::NewestFirst: {
      scratch_.assign(pocket.begin(), pocket.end());
      const bool oldest = config_.unit_selection == UnitSelection::OldestFirst;
      std::partial_sort(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(dm),
                        scratch_.end(), [&](std::uint32_t a, std::uint32_t b) {
                          if (unit_birth_[a] != unit_birth_[b])
                            return oldest ? unit_birth_[a] < unit_birth_[b]
                                          : unit_birth_[a] > unit_birth_[b];
                          return a < b;
                        });
      scratch_.resize(dm);
      break;
    }
  }

  for (std::uint64_t k = 0; k < dm; ++k) {
    const std::uint32_t unit = scratch_[k];
    if (lifespan_sink) lifespan_sink->push_back(tick_ - unit_birth_[unit]);
    unit_birth_[unit] = tick_;
    move_unit(unit, sender, receiver);
  }

  bump_balance_bin(balances_[sender], -1);
  bump_balance_bin(balances_[sender] - dm, +1);
  bump_balance_bin(balances_[receiver], -1);
  bump_balance_bin(balances_[receiver] + dm, +1);
  balances_[sender] -= dm;
  balances_[receiver] += dm;

  stats.transferred = dm;
  return stats;
}

RunResult run(const SimConfig& config) {
  config.validate();
  Simulation simulation(config);
  Rng rng(config.rng_seed);

  RunResult result;
  result.config = config;
  result.window = config.measure_iterations;
  result.entropy_trace.reserve(
      (config.burn_in_iterations + config.measure_iterations) / config.entropy_stride + 2);
  result.entropy_trace.push_back({0, simulation.entropy()});

  std::vector<std::uint64_t> lifespans;

  for (std::uint64_t i = 0; i < config.burn_in_iterations; ++i) {
    simulation.step(rng, nullptr);
    if (simulation.tick() % config.entropy_stride == 0)
      result.entropy_trace.push_back({simulation.tick(), simulation.entropy()});
  }
  for (std::uint64_t i = 0; i < config.measure_iterations; ++i) {
    const StepStats stats = simulation.step(rng, &lifespans);
    result.volume += stats.transferred;
    if (stats.skipped) ++result.skipped_transactions;
    if (simulation.tick() % config.entropy_stride == 0)
      result.entropy_trace.push_back({simulation.tick(), simulation.entropy()});
  }

  const std::uint64_t final_tick = simulation.tick();
  result.final_ages.time_unit = "iteration";
  result.final_ages.values.reserve(config.total_money);
  for (std::uint64_t birth : simulation.unit_birth())
    result.final_ages.values.push_back(static_cast<double>(final_tick - birth));

  result.lifespans.time_unit = "iteration";
  result.lifespans.values.reserve(lifespans.size());
  for (std::uint64_t gap : lifespans)
    result.lifespans.values.push_back(static_cast<double>(gap));

  return result;
}

double entropy(std::span<const std::uint64_t> balances) {
  if (balances.empty()) throw DataError("entropy of an empty balance list");
  std::uint64_t max_balance = 0;
  for (std::uint64_t b : balances) max_balance = std::max(max_balance, b);
  std::vector<std::uint64_t> bins(max_balance + 1, 0);
  for (std::uint64_t b : balances) ++bins[b];
  const double n = static_cast<double>(balances.size());
  double h = 0.0;
  for (std::uint64_t c : bins) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

bool stationarity_reached(std::span<const EntropyPoint> trace, std::size_t window,
                          double rel_tol) {
  if (window < 1) throw ConfigError("stationarity window must be at least 1");
  if (trace.size() < 2 * window)
    throw DataError("entropy trace shorter than two stationarity windows");
  const std::size_t n = trace.size();
  double recent = 0.0, previous = 0.0;
  for (std::size_t i = n - window; i < n; ++i) recent += trace[i].entropy;
  for (std::size_t i = n - 2 * window; i < n - window; ++i) previous += trace[i].entropy;
  recent /= static_cast<double>(window);
  previous /= static_cast<double>(window);
  const double scale = std::max(std::abs(recent), std::abs(previous));
  if (scale == 0.0) return true;
  return std::abs(recent - previous) / scale < rel_tol;
}

}  // namespace velo::sim
