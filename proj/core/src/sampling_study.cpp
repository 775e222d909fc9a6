#include "velo/sampling_study.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "velo/errors.hpp"
#include "velo/fits.hpp"
#include "velo/io.hpp"
#include "velo/rng.hpp"
#include "velo/stats.hpp"

namespace velo::study {

Estimator estimator_from_name(const std::string& name) {
  if (name == "f0") return Estimator::F0;
  if (name == "exponent") return Estimator::Exponent;
  if (name == "lifespan" || name == "lifespan-mean") return Estimator::LifespanMean;
  throw ConfigError("unknown estimator '" + name + "' (f0 | exponent | lifespan-mean)");
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::F0:
      return "f0";
    case Estimator::Exponent:
      return "exponent";
    case Estimator::LifespanMean:
      return "lifespan-mean";
  }
  return "exponent";
}

void StudyConfig::validate() const {
  if (ratios.empty()) throw ConfigError("study needs at least one ratio");
  for (double r : ratios)
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("study ratios must lie in (0, 1]");
  if (repetitions < 1) throw ConfigError("study repetitions must be at least 1");
}

namespace {

double estimate_once(const SampleSet& subsample, const StudyConfig& config) {
  switch (config.estimator) {
    case Estimator::Exponent:
      return dist::fit_exponential_mle(subsample).rate;
    case Estimator::F0: {
      const auto hist = dist::build_histogram(subsample, config.binning);
      const auto fit = dist::fit_exponential_loglinear(hist, config.f0_min_bin_count);
      if (fit.non_decaying) throw DataError("subsample produced a non-decaying fit");
      return fit.intercept;
    }
    case Estimator::LifespanMean:
      return velocity::from_lifespans(subsample).value;
  }
  throw ConfigError("unknown estimator");
}

}  // namespace

StudyResult run_study(const SampleSet& samples, const velocity::Estimate& baseline,
                      const StudyConfig& config) {
  config.validate();
  samples.validate();

  std::vector<double> sorted_ratios = config.ratios;
  std::sort(sorted_ratios.begin(), sorted_ratios.end());

  const std::size_t n = samples.size();
  const double min_ratio = sorted_ratios.front();
  if (static_cast<double>(n) * min_ratio < 100.0)
    throw DataError("too few samples: |samples| * min(ratios) must be at least 100");

  StudyResult result;
  result.baseline = baseline;
  result.rows.reserve(sorted_ratios.size());

  std::vector<std::uint32_t> indices(n);
  SampleSet subsample;
  subsample.time_unit = samples.time_unit;

  for (double ratio : sorted_ratios) {
    const auto take = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(config.repetitions));

    for (int rep = 0; rep < config.repetitions; ++rep) {
      if (take == n) {
        // Ratio 1 draws the whole set; keep the original order so the
        // estimate is identical to the full-sample fit.
        estimates.push_back(estimate_once(samples, config));
        continue;
      }
      Rng rng(derive_seed(config.rng_seed, std::bit_cast<std::uint64_t>(ratio),
                          static_cast<std::uint64_t>(rep)));
      std::iota(indices.begin(), indices.end(), std::uint32_t{0});
      subsample.values.clear();
      subsample.weights.clear();
      subsample.values.reserve(take);
      if (samples.weighted()) subsample.weights.reserve(take);
      for (std::size_t k = 0; k < take; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.below(n - k));
        std::swap(indices[k], indices[pick]);
        subsample.values.push_back(samples.values[indices[k]]);
        if (samples.weighted()) subsample.weights.push_back(samples.weights[indices[k]]);
      }
      estimates.push_back(estimate_once(subsample, config));
    }

    StudyRow row;
    row.ratio = ratio;
    row.n_samples = take;
    row.mean_velocity = stats::mean(estimates);
    row.std_velocity = stats::sample_stddev(estimates);
    result.rows.push_back(row);
  }
  return result;
}

std::string emit_study_csv(const StudyResult& result) {
  if (result.rows.empty()) throw DataError("empty study result");
  std::string csv = "ratio,mean,std,n,baseline\n";
  for (const auto& row : result.rows) {
    csv += io::format_double(row.ratio);
    csv += ',';
    csv += io::format_double(row.mean_velocity);
    csv += ',';
    csv += io::format_double(row.std_velocity);
    csv += ',';
    csv += std::to_string(row.n_samples);
    csv += ',';
    csv += io::format_double(result.baseline.value);
    csv += '\n';
  }
  return csv;
}

}  // namespace velo::study
