#include <benchmark/benchmark.h>

#include <sstream>

#include "velo/exchange_sim.hpp"
#include "velo/fits.hpp"
#include "velo/histogram.hpp"
#include "velo/ledger.hpp"
#include "velo/rng.hpp"

using namespace velo;

namespace {

static void BM_SimulationStep(benchmark::State& state) {
  sim::SimConfig config;
  config.n_agents = static_cast<std::uint32_t>(state.range(0));
  config.total_money = config.n_agents * 100ull;
  config.burn_in_iterations = 0;
  sim::Simulation simulation(config);
  Rng rng(1);
  std::vector<std::uint64_t> lifespans;
  for (auto _ : state) {
    lifespans.clear();
    benchmark::DoNotOptimize(simulation.step(rng, &lifespans));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_SimulationStep)->Arg(1000)->Arg(10000);

static void BM_BuildHistogram(benchmark::State& state) {
  Rng rng(2);
  SampleSet samples;
  samples.values.reserve(static_cast<std::size_t>(state.range(0)));
  for (std::int64_t i = 0; i < state.range(0); ++i)
    samples.values.push_back(rng.exponential(1e-4));
  for (auto _ : state)
    benchmark::DoNotOptimize(dist::build_histogram(samples, dist::BinningSpec::automatic()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildHistogram)->Arg(100000)->Arg(1000000);

static void BM_FitExponentialMle(benchmark::State& state) {
  Rng rng(3);
  SampleSet samples;
  for (std::int64_t i = 0; i < state.range(0); ++i)
    samples.values.push_back(rng.exponential(0.01));
  for (auto _ : state) benchmark::DoNotOptimize(dist::fit_exponential_mle(samples));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitExponentialMle)->Arg(100000);

static void BM_LedgerParse(benchmark::State& state) {
  ledger::SyntheticConfig config;
  config.n_coins = 500;
  config.rate_per_day = 0.2;
  config.duration_days = 120;
  config.supply = 500000;
  const auto txs = ledger::generate_synthetic_ledger(config);
  std::ostringstream buffer;
  ledger::write_ledger_jsonl(buffer, txs);
  const std::string text = buffer.str();
  for (auto _ : state) {
    std::istringstream in(text);
    std::size_t count = 0;
    ledger::parse_ledger(in, {}, [&](ledger::LedgerTx&&) { ++count; });
    benchmark::DoNotOptimize(count);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(txs.size()));
}
BENCHMARK(BM_LedgerParse);

}  // namespace

BENCHMARK_MAIN();
