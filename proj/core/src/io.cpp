#include "velo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "velo/errors.hpp"

namespace velo::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples,
                       const std::string& column_name) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << column_name;
  if (samples.weighted()) out << ",weight";
  out << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << format_double(samples.values[i]);
    if (samples.weighted()) out << ',' << format_double(samples.weights[i]);
    out << '\n';
  }
}

SampleSet read_samples_csv(const std::filesystem::path& path, const std::string& time_unit) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  SampleSet samples;
  samples.time_unit = time_unit;
  std::string line;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double value = 0.0, weight = 0.0;
    const int fields = std::sscanf(line.c_str(), "%lf,%lf", &value, &weight);
    if (fields < 1) {
      if (first) {
        first = false;  // header line
        continue;
      }
      throw DataError("unparseable CSV line " + std::to_string(line_no) + " in " +
                      path.string());
    }
    first = false;
    samples.values.push_back(value);
    if (fields == 2) samples.weights.push_back(weight);
  }
  if (samples.values.empty()) throw DataError("no samples found in " + path.string());
  if (!samples.weights.empty() && samples.weights.size() != samples.values.size())
    throw DataError("inconsistent weight column in " + path.string());
  samples.validate();
  return samples;
}

void write_entropy_csv(const std::filesystem::path& path,
                       std::span<const sim::EntropyPoint> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "tick,entropy\n";
  for (const auto& point : trace)
    out << point.tick << ',' << format_double(point.entropy) << '\n';
}

void write_fitplot_csv(const std::filesystem::path& path, const dist::Histogram& hist,
                       const std::function<double(double)>& fitted) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "bin_center,density,fitted_density\n";
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    const double center = hist.bin_center(i);
    out << format_double(center) << ',' << format_double(hist.densities[i]) << ','
        << format_double(fitted(center)) << '\n';
  }
}

std::string histogram_json(const dist::Histogram& hist) {
  json j;
  j["bin_edges"] = hist.bin_edges;
  j["densities"] = hist.densities;
  j["counts"] = hist.counts;
  j["total_weight"] = hist.total_weight;
  return j.dump(2);
}

std::string exponential_fit_json(const dist::ExponentialFit& fit) {
  json j;
  j["kind"] = "exponential";
  j["params"] = {{"rate", fit.rate}, {"intercept", fit.intercept}};
  j["r_squared"] = fit.r_squared;
  j["method"] = dist::fit_method_name(fit.method);
  if (fit.non_decaying) j["non_decaying"] = true;
  return j.dump(2);
}

std::string powerlaw_fit_json(const dist::PowerLawFit& fit) {
  json j;
  j["kind"] = "power-law";
  j["params"] = {{"exponent", fit.exponent}, {"prefactor", fit.prefactor}};
  j["r_squared"] = fit.r_squared;
  j["xmin"] = fit.xmin;
  if (fit.degenerate) j["degenerate"] = true;
  return j.dump(2);
}

std::string velocity_json(const velocity::Estimate& estimate) {
  json j;
  j["value"] = estimate.value;
  j["method"] = estimate.method.label();
  j["inputs"] = estimate.inputs_digest;
  if (estimate.std_error) j["stderr"] = *estimate.std_error;
  if (estimate.method.kind == velocity::Method::Kind::Corrected) {
    j["order"] = estimate.method.order;
    j["delta_t"] = estimate.method.delta_t;
    j["terms"] = estimate.correction_terms;
  }
  if (estimate.method.trend_proxy) j["trend_proxy"] = true;
  return j.dump(2);
}

std::string run_summary_json(const sim::RunResult& result) {
  const auto& cfg = result.config;
  json j;
  j["volume"] = result.volume;
  j["window"] = result.window;
  j["v_g"] = result.ground_truth_velocity();
  j["skipped"] = result.skipped_transactions;
  j["seed"] = cfg.rng_seed;
  j["config"] = {
      {"n_agents", cfg.n_agents},
      {"total_money", cfg.total_money},
      {"transfer_mode",
       cfg.transfer_mode == sim::TransferMode::Fixed ? "fixed" : "uniform"},
      {"fixed_fraction", cfg.fixed_fraction},
      {"unit_selection", cfg.unit_selection == sim::UnitSelection::Random
                             ? "random"
                             : (cfg.unit_selection == sim::UnitSelection::OldestFirst
                                    ? "oldest-first"
                                    : "newest-first")},
      {"burn_in_iterations", cfg.burn_in_iterations},
      {"measure_iterations", cfg.measure_iterations},
      {"entropy_stride", cfg.entropy_stride},
  };
  return j.dump(2);
}

std::string study_json(const study::StudyResult& result) {
  json j;
  j["baseline"] = {{"value", result.baseline.value},
                   {"method", result.baseline.method.label()}};
  j["rows"] = json::array();
  for (const auto& row : result.rows)
    j["rows"].push_back({{"ratio", row.ratio},
                         {"mean_velocity", row.mean_velocity},
                         {"std_velocity", row.std_velocity},
                         {"n_samples", row.n_samples}});
  return j.dump(2);
}

std::string periods_csv(std::span<const ledger::PeriodReport> reports) {
  std::string csv = "period,volume,supply,ground_truth_v,regression_v,alpha,r2,n_samples\n";
  for (const auto& r : reports) {
    csv += r.period;
    csv += ',';
    csv += std::to_string(r.volume);
    csv += ',';
    csv += format_double(r.supply);
    csv += ',';
    csv += format_double(r.ground_truth_velocity.value);
    csv += ',';
    csv += format_double(r.regression_velocity.value);
    csv += ',';
    csv += format_double(r.fit.exponent);
    csv += ',';
    csv += format_double(r.fit.r_squared);
    csv += ',';
    csv += std::to_string(r.n_samples);
    csv += '\n';
  }
  return csv;
}

FitDocument read_fit_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open for reading: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("invalid fit JSON in " + path.string() + ": " + e.what());
  }
  FitDocument doc;
  const std::string kind = j.value("kind", "");
  if (kind == "exponential") {
    doc.kind = FitDocument::Kind::Exponential;
    doc.exponential.rate = j.at("params").at("rate").get<double>();
    doc.exponential.intercept = j.at("params").value("intercept", doc.exponential.rate);
    doc.exponential.r_squared = j.value("r_squared", 0.0);
    doc.exponential.method = j.value("method", "mle") == std::string("log-linear")
                                 ? dist::FitMethod::LogLinear
                                 : dist::FitMethod::Mle;
    doc.exponential.non_decaying = j.value("non_decaying", false);
  } else if (kind == "power-law") {
    doc.kind = FitDocument::Kind::PowerLaw;
    doc.power_law.exponent = j.at("params").at("exponent").get<double>();
    doc.power_law.prefactor = j.at("params").at("prefactor").get<double>();
    doc.power_law.xmin = j.value("xmin", 1.0);
    doc.power_law.r_squared = j.value("r_squared", 0.0);
    doc.power_law.degenerate = j.value("degenerate", false);
  } else {
    throw DataError("fit JSON has unknown kind '" + kind + "' in " + path.string());
  }
  return doc;
}

}  // namespace velo::io
