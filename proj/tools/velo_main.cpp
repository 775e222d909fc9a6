// velo: estimate the velocity of money from holding-time and lifespan
// distributions. Subcommands cover the full pipeline: simulate a closed
// random-exchange economy, fit age distributions, turn fits into velocity
// estimates, run subsampling studies, and ingest UTXO-style ledgers.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "velo/errors.hpp"
#include "velo/exchange_sim.hpp"
#include "velo/fits.hpp"
#include "velo/histogram.hpp"
#include "velo/io.hpp"
#include "velo/ledger.hpp"
#include "velo/pdf_model.hpp"
#include "velo/rng.hpp"
#include "velo/sampling_study.hpp"
#include "velo/stats.hpp"
#include "velo/velocity.hpp"
#include "velo/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace velo;

namespace {

std::uint64_t draw_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  const std::uint64_t drawn = draw_seed();
  std::cerr << "seed: " << drawn << "\n";
  return drawn;
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command, fs::path out_dir)
      : command_(std::move(command)), out_dir_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(out_dir_);
  }

  json& options() { return options_; }
  void add_input(const fs::path& p) { inputs_.push_back(p.string()); }
  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  fs::path out(const std::string& name) const { return out_dir_ / name; }

  void write() const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json j;
    j["command"] = command_;
    j["tool_version"] = kVersion;
    if (seed_) j["seed"] = *seed_;
    j["options"] = options_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["duration_seconds"] = seconds;
    io::write_text_file(out_dir_ / "manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path out_dir_;
  std::chrono::steady_clock::time_point start_;
  json options_ = json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
};

sim::TransferMode transfer_mode_from(const std::string& name) {
  if (name == "uniform") return sim::TransferMode::UniformRandom;
  if (name == "fixed") return sim::TransferMode::Fixed;
  throw ConfigError("unknown v-mode '" + name + "' (uniform | fixed)");
}

sim::UnitSelection unit_selection_from(const std::string& name) {
  if (name == "random") return sim::UnitSelection::Random;
  if (name == "oldest") return sim::UnitSelection::OldestFirst;
  if (name == "newest") return sim::UnitSelection::NewestFirst;
  throw ConfigError("unknown unit selection '" + name + "' (random | oldest | newest)");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  sim::SimConfig config;
  std::string v_mode = "uniform";
  std::string unit_selection = "random";
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

void run_simulate(const SimulateArgs& args) {
  sim::SimConfig config = args.config;
  config.transfer_mode = transfer_mode_from(args.v_mode);
  config.unit_selection = unit_selection_from(args.unit_selection);
  config.rng_seed = resolve_seed(args.seed);
  config.validate();

  ManifestWriter manifest("simulate", args.out_dir);
  manifest.set_seed(config.rng_seed);
  manifest.options() = {
      {"agents", config.n_agents},
      {"money", config.total_money},
      {"burn_in", config.burn_in_iterations},
      {"measure", config.measure_iterations},
      {"v_mode", args.v_mode},
      {"v", config.fixed_fraction},
      {"unit_selection", args.unit_selection},
      {"entropy_stride", config.entropy_stride},
  };

  const auto result = sim::run(config);

  io::write_samples_csv(manifest.out("ages.csv"), result.final_ages, "age");
  io::write_samples_csv(manifest.out("lifespans.csv"), result.lifespans, "lifespan");
  io::write_entropy_csv(manifest.out("entropy.csv"), result.entropy_trace);
  io::write_text_file(manifest.out("summary.json"), io::run_summary_json(result) + "\n");
  for (const char* name : {"ages.csv", "lifespans.csv", "entropy.csv", "summary.json"})
    manifest.add_output(manifest.out(name));
  manifest.write();

  std::cout << "v_g " << io::format_double(result.ground_truth_velocity()) << " volume "
            << result.volume << " skipped " << result.skipped_transactions << "\n";
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::string model = "exp-mle";
  std::string binning = "auto";
  double xmin = 0.0;
  double min_count = 0.0;
  std::string out_dir = ".";
};

void run_fit(const FitArgs& args) {
  ManifestWriter manifest("fit", args.out_dir);
  manifest.options() = {{"input", args.input},
                        {"model", args.model},
                        {"binning", args.binning},
                        {"xmin", args.xmin},
                        {"min_count", args.min_count}};
  manifest.add_input(args.input);

  const SampleSet samples = io::read_samples_csv(args.input);
  const auto binning = dist::BinningSpec::parse(args.binning);

  std::string fit_json;
  dist::Histogram hist;
  std::function<double(double)> fitted;

  if (args.model == "exp-mle") {
    const auto fit = dist::fit_exponential_mle(samples);
    hist = dist::build_histogram(samples, binning);
    fit_json = io::exponential_fit_json(fit);
    fitted = [fit](double x) { return fit.rate * std::exp(-fit.rate * x); };
  } else if (args.model == "exp-loglin") {
    hist = dist::build_histogram(samples, binning);
    const auto fit = dist::fit_exponential_loglinear(hist, args.min_count);
    if (fit.non_decaying)
      std::cerr << "warning: non-decaying fit (slope >= 0); result is flagged\n";
    fit_json = io::exponential_fit_json(fit);
    fitted = [fit](double x) { return fit.intercept * std::exp(-fit.rate * x); };
  } else if (args.model == "powerlaw") {
    hist = dist::build_histogram(samples, binning);
    const double xmin = args.xmin > 0.0 ? args.xmin : dist::default_powerlaw_xmin(hist);
    const auto fit = dist::fit_powerlaw_loglog(hist, xmin, args.min_count);
    if (fit.degenerate)
      std::cerr << "warning: degenerate power-law fit (non-decaying slope)\n";
    fit_json = io::powerlaw_fit_json(fit);
    fitted = [fit](double x) {
      return x < fit.xmin ? 0.0 : fit.prefactor * std::pow(x, -fit.exponent);
    };
  } else {
    throw ConfigError("unknown model '" + args.model + "' (exp-mle | exp-loglin | powerlaw)");
  }

  io::write_text_file(manifest.out("fit.json"), fit_json + "\n");
  io::write_fitplot_csv(manifest.out("fitplot.csv"), hist, fitted);
  manifest.add_output(manifest.out("fit.json"));
  manifest.add_output(manifest.out("fitplot.csv"));
  manifest.write();
  std::cout << fit_json << "\n";
}

// ---------------------------------------------------------------- velocity

struct VelocityArgs {
  std::string fit_path;
  std::string samples_path;
  std::string method = "f0";
  int order = 2;
  double delta_t = 1.0;
  double fd_step = 0.0;
  std::string binning = "auto";
  double min_count = 0.0;
  std::string out_dir = ".";
};

void run_velocity(const VelocityArgs& args) {
  if (args.fit_path.empty() == args.samples_path.empty())
    throw ConfigError("velocity needs exactly one of --fit or --samples");

  ManifestWriter manifest("velocity", args.out_dir);
  manifest.options() = {{"method", args.method},   {"order", args.order},
                        {"delta_t", args.delta_t}, {"fd_step", args.fd_step},
                        {"binning", args.binning}, {"min_count", args.min_count}};

  velocity::Estimate estimate;
  if (!args.fit_path.empty()) {
    manifest.add_input(args.fit_path);
    manifest.options()["fit"] = args.fit_path;
    const auto doc = io::read_fit_json(args.fit_path);
    const bool power = doc.kind == io::FitDocument::Kind::PowerLaw;
    if (args.method == "f0") {
      estimate = power ? velocity::from_f0(dist::PdfModel::from_fit(doc.power_law))
                       : velocity::from_f0(doc.exponential);
    } else if (args.method == "exponent") {
      estimate = power ? velocity::from_exponent(doc.power_law)
                       : velocity::from_exponent(doc.exponential);
    } else if (args.method == "corrected") {
      velocity::CorrectionParams params;
      params.order = args.order;
      params.delta_t = args.delta_t;
      params.source = velocity::CorrectionParams::DerivativeSource::AnalyticFromFit;
      if (args.fd_step > 0.0) params.fd_step = args.fd_step;
      const auto model = power ? dist::PdfModel::from_fit(doc.power_law)
                               : dist::PdfModel::from_fit(doc.exponential);
      estimate = velocity::corrected(model, params);
    } else if (args.method == "lifespan") {
      throw ConfigError("the lifespan method needs --samples, not --fit");
    } else {
      throw ConfigError("unknown method '" + args.method +
                        "' (f0 | exponent | corrected | lifespan)");
    }
  } else {
    manifest.add_input(args.samples_path);
    manifest.options()["samples"] = args.samples_path;
    const SampleSet samples = io::read_samples_csv(args.samples_path);
    const auto binning = dist::BinningSpec::parse(args.binning);
    if (args.method == "lifespan") {
      estimate = velocity::from_lifespans(samples);
    } else if (args.method == "exponent") {
      estimate = velocity::from_exponent(dist::fit_exponential_mle(samples));
    } else if (args.method == "f0") {
      const auto hist = dist::build_histogram(samples, binning);
      estimate = velocity::from_f0(dist::fit_exponential_loglinear(hist, args.min_count));
    } else if (args.method == "corrected") {
      const auto hist = dist::build_histogram(samples, binning);
      velocity::CorrectionParams params;
      params.order = args.order;
      params.delta_t = args.delta_t;
      params.source = velocity::CorrectionParams::DerivativeSource::FiniteDifference;
      params.fd_step = args.fd_step > 0.0 ? args.fd_step : hist.bin_width(0);
      estimate = velocity::corrected(dist::PdfModel::from_histogram(hist), params);
    } else {
      throw ConfigError("unknown method '" + args.method +
                        "' (f0 | exponent | corrected | lifespan)");
    }
  }

  const std::string text = io::velocity_json(estimate);
  io::write_text_file(manifest.out("velocity.json"), text + "\n");
  manifest.add_output(manifest.out("velocity.json"));
  manifest.write();
  std::cout << text << "\n";
}

// ------------------------------------------------------------------- study

struct StudyArgs {
  std::string samples_path;
  std::vector<double> ratios;
  int repetitions = 10;
  std::string estimator = "exponent";
  std::string binning = "auto";
  double f0_min_count = 0.0;
  std::optional<double> baseline;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

void run_study_cmd(const StudyArgs& args) {
  ManifestWriter manifest("study", args.out_dir);
  manifest.add_input(args.samples_path);

  const SampleSet samples = io::read_samples_csv(args.samples_path);

  study::StudyConfig config;
  if (!args.ratios.empty()) config.ratios = args.ratios;
  config.repetitions = args.repetitions;
  config.estimator = study::estimator_from_name(args.estimator);
  config.binning = dist::BinningSpec::parse(args.binning);
  config.f0_min_bin_count = args.f0_min_count;
  config.rng_seed = resolve_seed(args.seed);

  velocity::Estimate baseline;
  if (args.baseline) {
    baseline = velocity::ground_truth(*args.baseline, 1.0, 1.0);  // literal value
    baseline.inputs_digest = "caller-supplied baseline";
  } else {
    baseline = config.estimator == study::Estimator::LifespanMean
                   ? velocity::from_lifespans(samples)
                   : velocity::from_exponent(dist::fit_exponential_mle(samples));
    baseline.inputs_digest = "full-sample estimate";
  }

  manifest.set_seed(config.rng_seed);
  manifest.options() = {{"samples", args.samples_path},
                        {"ratios", config.ratios},
                        {"repetitions", config.repetitions},
                        {"estimator", args.estimator},
                        {"binning", args.binning},
                        {"f0_min_count", args.f0_min_count},
                        {"baseline", baseline.value}};

  const auto result = study::run_study(samples, baseline, config);
  io::write_text_file(manifest.out("study.csv"), study::emit_study_csv(result));
  io::write_text_file(manifest.out("study.json"), io::study_json(result) + "\n");
  manifest.add_output(manifest.out("study.csv"));
  manifest.add_output(manifest.out("study.json"));
  manifest.write();
  std::cout << study::emit_study_csv(result);
}

// ------------------------------------------------------------------ ingest

struct IngestArgs {
  std::string ledger_path;
  std::string period = "month";
  double supply = 0.0;
  std::string supply_file;
  std::string binning = "log:24";
  double xmin = 0.0;
  double min_count = 0.0;
  std::string time_unit = "day";
  double sample_ratio = 1.0;
  std::uint64_t sample_seed = 1;
  bool lenient = false;
  double volume_cap = 0.0;
  bool audit = false;
  std::string out_dir = ".";
};

void run_ingest(const IngestArgs& args) {
  if (!(args.supply > 0.0) && args.supply_file.empty())
    throw ConfigError("ingest needs --supply or --supply-file");
  if (!(args.sample_ratio > 0.0 && args.sample_ratio <= 1.0))
    throw ConfigError("--sample-ratio must lie in (0, 1]");
  if (args.time_unit != "day" && args.time_unit != "second")
    throw ConfigError("--time-unit must be day or second");

  ManifestWriter manifest("ingest", args.out_dir);
  manifest.add_input(args.ledger_path);
  manifest.options() = {{"ledger", args.ledger_path}, {"period", args.period},
                        {"supply", args.supply},      {"binning", args.binning},
                        {"xmin", args.xmin},          {"time_unit", args.time_unit},
                        {"sample_ratio", args.sample_ratio},
                        {"strict", !args.lenient},    {"volume_cap", args.volume_cap}};

  std::map<std::string, double> supply_by_period;
  if (!args.supply_file.empty()) {
    std::ifstream in(args.supply_file);
    if (!in) throw DataError("cannot open supply file: " + args.supply_file);
    std::string line;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      try {
        supply_by_period[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
      } catch (const std::exception&) {
        continue;  // header or malformed row
      }
    }
    manifest.add_input(args.supply_file);
  }

  std::ifstream in(args.ledger_path);
  if (!in) throw DataError("cannot open ledger: " + args.ledger_path);
  ledger::ParseOptions options;
  options.strict = !args.lenient;
  ledger::ParseStats stats;
  std::vector<ledger::LedgerTx> txs = ledger::read_ledger(in, options, &stats);
  if (stats.skipped > 0)
    std::cerr << "warning: skipped " << stats.skipped << " invalid line(s)\n";

  std::uint64_t capped_inputs = 0;
  if (args.volume_cap > 0.0) {
    // Optional outlier filter: very large transfers inflate the ground truth
    // without moving the regression; dropped inputs leave both measures.
    for (auto& tx : txs) {
      std::erase_if(tx.inputs, [&](const ledger::TxInput& input) {
        const bool drop = static_cast<double>(input.amount) > args.volume_cap;
        capped_inputs += drop ? 1 : 0;
        return drop;
      });
    }
    std::erase_if(txs, [](const ledger::LedgerTx& tx) { return tx.inputs.empty(); });
    if (capped_inputs > 0)
      std::cerr << "volume cap dropped " << capped_inputs << " input(s)\n";
  }

  if (args.audit) {
    const auto report = ledger::audit_ledger(txs);
    json audit_json = {{"matched", report.matched},
                       {"external", report.external},
                       {"unmatched", report.unmatched}};
    io::write_text_file(manifest.out("audit.json"), audit_json.dump(2) + "\n");
    manifest.add_output(manifest.out("audit.json"));
    std::cout << "audit: matched " << report.matched << " external " << report.external
              << " unmatched " << report.unmatched << "\n";
  }

  ledger::PeriodSpec period =
      args.period == "day" ? ledger::PeriodSpec::day() : ledger::PeriodSpec::month();
  if (args.period != "day" && args.period != "month")
    throw ConfigError("--period must be month or day");
  auto buckets = ledger::holding_times_by_period(txs, period);
  if (buckets.empty()) throw DataError("ledger produced no periods");

  const double unit_scale = args.time_unit == "day" ? 86400.0 : 1.0;

  ledger::PeriodFitConfig fit_config;
  fit_config.binning = dist::BinningSpec::parse(args.binning);
  fit_config.xmin = args.xmin;
  fit_config.min_bin_count = args.min_count;

  std::vector<ledger::PeriodReport> reports;
  for (const auto& bucket : buckets) {
    SampleSet holding = bucket.holding;
    holding.time_unit = args.time_unit;
    for (auto& v : holding.values) v /= unit_scale;

    if (args.sample_ratio < 1.0) {
      Rng rng(derive_seed(args.sample_seed, std::hash<std::string>{}(bucket.label)));
      const auto take = static_cast<std::size_t>(
          std::floor(args.sample_ratio * static_cast<double>(holding.size())));
      if (take < 3) throw DataError("sample ratio leaves too few samples in " + bucket.label);
      SampleSet sub;
      sub.time_unit = holding.time_unit;
      std::vector<std::uint32_t> idx(holding.size());
      std::iota(idx.begin(), idx.end(), 0u);
      for (std::size_t k = 0; k < take; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.below(idx.size() - k));
        std::swap(idx[k], idx[pick]);
        sub.values.push_back(holding.values[idx[k]]);
        sub.weights.push_back(holding.weights[idx[k]]);
      }
      holding = std::move(sub);
    }

    const double supply = supply_by_period.count(bucket.label)
                              ? supply_by_period.at(bucket.label)
                              : args.supply;
    if (!(supply > 0.0))
      throw ConfigError("no positive supply configured for period " + bucket.label);
    const double period_length = static_cast<double>(bucket.length_seconds) / unit_scale;

    auto report = ledger::period_report(bucket.label, holding, bucket.volume, supply,
                                        period_length, fit_config);
    const auto& fit = report.fit;
    io::write_fitplot_csv(manifest.out("hist_" + bucket.label + ".csv"), report.histogram,
                          [fit](double x) {
                            return x < fit.xmin ? 0.0
                                                : fit.prefactor * std::pow(x, -fit.exponent);
                          });
    manifest.add_output(manifest.out("hist_" + bucket.label + ".csv"));
    reports.push_back(std::move(report));
  }

  io::write_text_file(manifest.out("periods.csv"), io::periods_csv(reports));
  manifest.add_output(manifest.out("periods.csv"));
  manifest.write();
  std::cout << io::periods_csv(reports);
}

// --------------------------------------------------------------- gen-ledger

struct GenLedgerArgs {
  ledger::SyntheticConfig config;
  std::string mode = "exp";
  std::vector<double> monthly_rates;
  std::vector<double> monthly_alphas;
  std::optional<std::uint64_t> seed;
  std::string out_name = "ledger.jsonl";
  std::string out_dir = ".";
};

void run_gen_ledger(const GenLedgerArgs& args) {
  ledger::SyntheticConfig config = args.config;
  if (args.mode == "exp") {
    config.mode = ledger::SyntheticConfig::Mode::Exponential;
  } else if (args.mode == "heavy") {
    config.mode = ledger::SyntheticConfig::Mode::HeavyTail;
  } else {
    throw ConfigError("unknown mode '" + args.mode + "' (exp | heavy)");
  }
  config.monthly_rates = args.monthly_rates;
  config.monthly_exponents = args.monthly_alphas;
  config.rng_seed = resolve_seed(args.seed);
  config.validate();

  ManifestWriter manifest("gen-ledger", args.out_dir);
  manifest.set_seed(config.rng_seed);
  manifest.options() = {{"coins", config.n_coins},
                        {"rate", config.rate_per_day},
                        {"monthly_rates", config.monthly_rates},
                        {"days", config.duration_days},
                        {"supply", config.supply},
                        {"start", config.start_ts},
                        {"mode", args.mode},
                        {"alpha", config.heavy_tail_exponent},
                        {"monthly_alphas", config.monthly_exponents},
                        {"xmin_days", config.heavy_tail_xmin_days}};

  const auto txs = ledger::generate_synthetic_ledger(config);
  std::ofstream out(manifest.out(args.out_name), std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + manifest.out(args.out_name).string());
  ledger::write_ledger_jsonl(out, txs);
  manifest.add_output(manifest.out(args.out_name));
  manifest.write();
  std::cout << "wrote " << txs.size() << " transactions\n";
}

// ------------------------------------------------------------------- repro

struct ReproArgs {
  std::uint64_t seed = 1;
  std::uint64_t measure = 40'000;
  std::string out_dir = ".";
};

/// Chains the simulation-protocol reproduction: simulate, fit the age
/// distribution both ways, estimate velocity by every route, and run the
/// subsampling study with both estimators.
void run_repro(const ReproArgs& args) {
  ManifestWriter manifest("repro", args.out_dir);
  manifest.set_seed(args.seed);
  manifest.options() = {{"seed", args.seed}, {"measure", args.measure}};

  sim::SimConfig config;
  config.rng_seed = args.seed;
  config.measure_iterations = args.measure;
  config.entropy_stride = 10;
  const auto result = sim::run(config);
  const double v_g = result.ground_truth_velocity();

  io::write_samples_csv(manifest.out("ages.csv"), result.final_ages, "age");
  io::write_samples_csv(manifest.out("lifespans.csv"), result.lifespans, "lifespan");
  io::write_entropy_csv(manifest.out("entropy.csv"), result.entropy_trace);
  io::write_text_file(manifest.out("summary.json"), io::run_summary_json(result) + "\n");

  const auto mle = dist::fit_exponential_mle(result.final_ages);
  const auto hist = dist::build_histogram(result.final_ages, dist::BinningSpec::automatic());
  const auto loglin = dist::fit_exponential_loglinear(hist, 100.0);
  io::write_text_file(manifest.out("fit_mle.json"), io::exponential_fit_json(mle) + "\n");
  io::write_text_file(manifest.out("fit_loglin.json"), io::exponential_fit_json(loglin) + "\n");

  const auto baseline = velocity::ground_truth(static_cast<double>(result.volume),
                                               static_cast<double>(config.total_money),
                                               static_cast<double>(result.window));

  json summary;
  summary["v_g"] = v_g;
  summary["velocity_exponent"] = velocity::from_exponent(mle).value;
  if (loglin.non_decaying) {
    // A short window can leave the age histogram non-decaying; report the
    // flag instead of aborting the chain.
    summary["velocity_f0"] = nullptr;
    summary["f0_non_decaying"] = true;
  } else {
    summary["velocity_f0"] = velocity::from_f0(loglin).value;
  }
  summary["velocity_lifespan"] = velocity::from_lifespans(result.lifespans).value;
  io::write_text_file(manifest.out("velocities.json"), summary.dump(2) + "\n");

  for (auto estimator : {study::Estimator::Exponent, study::Estimator::F0}) {
    study::StudyConfig sc;
    sc.estimator = estimator;
    sc.rng_seed = derive_seed(args.seed, 0xf16u, estimator == study::Estimator::F0);
    sc.f0_min_bin_count = 100.0;
    const auto study_result = study::run_study(result.final_ages, baseline, sc);
    io::write_text_file(manifest.out("study_" + study::estimator_name(estimator) + ".csv"),
                        study::emit_study_csv(study_result));
  }

  for (const char* name :
       {"ages.csv", "lifespans.csv", "entropy.csv", "summary.json", "fit_mle.json",
        "fit_loglin.json", "velocities.json", "study_exponent.csv", "study_f0.csv"})
    manifest.add_output(manifest.out(name));
  manifest.write();
  std::cout << summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"velocity-of-money estimation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "run the closed-economy exchange simulation");
  sim_cmd->add_option("--agents", sim_args.config.n_agents, "number of agents");
  sim_cmd->add_option("--money", sim_args.config.total_money, "total indivisible money units");
  sim_cmd->add_option("--burn-in", sim_args.config.burn_in_iterations, "burn-in iterations");
  sim_cmd->add_option("--measure", sim_args.config.measure_iterations,
                      "measurement iterations");
  sim_cmd->add_option("--v-mode", sim_args.v_mode, "transfer fraction mode: uniform | fixed");
  sim_cmd->add_option("--v", sim_args.config.fixed_fraction, "fixed transfer fraction (0,1]");
  sim_cmd->add_option("--unit-selection", sim_args.unit_selection,
                      "which units move: random | oldest | newest");
  sim_cmd->add_option("--entropy-stride", sim_args.config.entropy_stride,
                      "record entropy every N ticks");
  sim_cmd->add_option("--seed", sim_args.seed, "rng seed (drawn and printed when absent)");
  sim_cmd->add_option("--out-dir", sim_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit a distribution model to samples");
  fit_cmd->add_option("--input", fit_args.input, "samples CSV (value[,weight])")->required();
  fit_cmd->add_option("--model", fit_args.model, "exp-mle | exp-loglin | powerlaw");
  fit_cmd->add_option("--binning", fit_args.binning, "auto | fixed:W | log:N");
  fit_cmd->add_option("--xmin", fit_args.xmin, "power-law fitting threshold");
  fit_cmd->add_option("--min-count", fit_args.min_count,
                      "exclude bins with fewer weighted counts from regressions");
  fit_cmd->add_option("--out-dir", fit_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  VelocityArgs vel_args;
  auto* vel_cmd = app.add_subcommand("velocity", "turn a fit or samples into a velocity");
  vel_cmd->add_option("--fit", vel_args.fit_path, "fit.json produced by the fit command");
  vel_cmd->add_option("--samples", vel_args.samples_path, "samples CSV");
  vel_cmd->add_option("--method", vel_args.method, "f0 | exponent | corrected | lifespan");
  vel_cmd->add_option("--order", vel_args.order, "correction order (>= 1)");
  vel_cmd->add_option("--dt", vel_args.delta_t, "correction time step");
  vel_cmd->add_option("--fd-step", vel_args.fd_step, "finite-difference step at zero");
  vel_cmd->add_option("--binning", vel_args.binning, "binning for the samples route");
  vel_cmd->add_option("--min-count", vel_args.min_count, "bin count floor for f0 fits");
  vel_cmd->add_option("--out-dir", vel_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  StudyArgs study_args;
  auto* study_cmd = app.add_subcommand("study", "velocity vs sampling-ratio study");
  study_cmd->add_option("--samples", study_args.samples_path, "samples CSV")->required();
  study_cmd->add_option("--ratios", study_args.ratios, "sampling ratios in (0,1]")
      ->delimiter(',');
  study_cmd->add_option("--reps", study_args.repetitions, "repetitions per ratio");
  study_cmd->add_option("--estimator", study_args.estimator, "f0 | exponent | lifespan");
  study_cmd->add_option("--binning", study_args.binning, "binning for the f0 estimator");
  study_cmd->add_option("--f0-min-count", study_args.f0_min_count,
                        "bin count floor for the f0 estimator");
  study_cmd->add_option("--baseline", study_args.baseline,
                        "baseline velocity (defaults to the full-sample estimate)");
  study_cmd->add_option("--seed", study_args.seed, "rng seed (drawn and printed when absent)");
  study_cmd->add_option("--out-dir", study_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "per-period reports from a JSON-lines ledger");
  ingest_cmd->add_option("--ledger", ingest_args.ledger_path, "JSON-lines ledger")->required();
  ingest_cmd->add_option("--period", ingest_args.period, "month | day");
  ingest_cmd->add_option("--supply", ingest_args.supply, "circulating supply per period");
  ingest_cmd->add_option("--supply-file", ingest_args.supply_file,
                         "CSV period,supply overriding --supply");
  ingest_cmd->add_option("--binning", ingest_args.binning, "histogram binning");
  ingest_cmd->add_option("--xmin", ingest_args.xmin, "power-law fitting threshold");
  ingest_cmd->add_option("--min-count", ingest_args.min_count, "bin count floor for fits");
  ingest_cmd->add_option("--time-unit", ingest_args.time_unit, "day | second");
  ingest_cmd->add_option("--sample-ratio", ingest_args.sample_ratio,
                         "fit on a random fraction of each period's samples");
  ingest_cmd->add_option("--sample-seed", ingest_args.sample_seed, "subsample seed");
  ingest_cmd->add_flag("--lenient", ingest_args.lenient,
                       "skip invalid lines instead of aborting");
  ingest_cmd->add_option("--volume-cap", ingest_args.volume_cap,
                         "drop inputs larger than this amount (0 = off)");
  ingest_cmd->add_flag("--audit", ingest_args.audit,
                       "cross-check input provenance against prior outputs");
  ingest_cmd->add_option("--out-dir", ingest_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  GenLedgerArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen-ledger", "generate a synthetic ledger");
  gen_cmd->add_option("--coins", gen_args.config.n_coins, "number of coins");
  gen_cmd->add_option("--rate", gen_args.config.rate_per_day, "respend rate per day");
  gen_cmd->add_option("--monthly-rates", gen_args.monthly_rates, "per-month respend rates")
      ->delimiter(',');
  gen_cmd->add_option("--days", gen_args.config.duration_days, "duration in days");
  gen_cmd->add_option("--supply", gen_args.config.supply, "total supply");
  gen_cmd->add_option("--start", gen_args.config.start_ts, "start timestamp (s)");
  gen_cmd->add_option("--mode", gen_args.mode, "exp | heavy");
  gen_cmd->add_option("--alpha", gen_args.config.heavy_tail_exponent,
                      "heavy-tail pdf exponent");
  gen_cmd->add_option("--monthly-alphas", gen_args.monthly_alphas,
                      "per-month heavy-tail exponents")
      ->delimiter(',');
  gen_cmd->add_option("--xmin-days", gen_args.config.heavy_tail_xmin_days,
                      "heavy-tail minimum interval (days)");
  gen_cmd->add_option("--seed", gen_args.seed, "rng seed (drawn and printed when absent)");
  gen_cmd->add_option("--out", gen_args.out_name, "output file name");
  gen_cmd->add_option("--out-dir", gen_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  ReproArgs repro_args;
  auto* repro_cmd =
      app.add_subcommand("repro", "simulate + fit + velocities + study in one pass");
  repro_cmd->add_option("--seed", repro_args.seed, "rng seed");
  repro_cmd->add_option("--measure", repro_args.measure, "measurement iterations");
  repro_cmd->add_option("--out-dir", repro_args.out_dir, "output directory")
      ->envname("VELO_OUT_DIR");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim_cmd->parsed()) run_simulate(sim_args);
    if (fit_cmd->parsed()) run_fit(fit_args);
    if (vel_cmd->parsed()) run_velocity(vel_args);
    if (study_cmd->parsed()) run_study_cmd(study_args);
    if (ingest_cmd->parsed()) run_ingest(ingest_args);
    if (gen_cmd->parsed()) run_gen_ledger(gen_args);
    if (repro_cmd->parsed()) run_repro(repro_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const LedgerParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
