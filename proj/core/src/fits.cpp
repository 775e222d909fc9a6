#include "velo/fits.hpp"

#include <cmath>
#include <vector>

#include "velo/errors.hpp"
#include "velo/stats.hpp"

namespace velo::dist {

ExponentialFit fit_exponential_mle(const SampleSet& samples) {
  samples.validate();
  if (samples.size() < 2) throw DataError("exponential fit needs at least 2 samples");
  const double mean = samples.weighted_mean();
  if (!(mean > 0.0)) throw DataError("exponential fit on all-zero samples");

  ExponentialFit fit;
  fit.method = FitMethod::Mle;
  fit.rate = 1.0 / mean;
  fit.intercept = fit.rate;

  try {
    const Histogram hist = build_histogram(samples, BinningSpec::automatic());
    std::vector<double> observed, predicted;
    for (std::size_t i = 0; i < hist.bin_count(); ++i) {
      if (hist.densities[i] <= 0.0) continue;
      observed.push_back(std::log(hist.densities[i]));
      predicted.push_back(std::log(fit.rate) - fit.rate * hist.bin_center(i));
    }
    if (observed.size() >= 2) fit.r_squared = stats::r_squared_against(observed, predicted);
  } catch (const DataError&) {
    fit.r_squared = 0.0;
  }
  return fit;
}

ExponentialFit fit_exponential_loglinear(const Histogram& hist, double min_bin_count) {
  std::vector<double> centers, log_density;
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    if (hist.densities[i] <= 0.0 || hist.counts[i] < min_bin_count) continue;
    centers.push_back(hist.bin_center(i));
    log_density.push_back(std::log(hist.densities[i]));
  }
  if (centers.size() < 3)
    throw DataError("log-linear fit needs at least 3 positive-density bins");

  const auto reg = stats::linear_regression(centers, log_density);
  ExponentialFit fit;
  fit.method = FitMethod::LogLinear;
  fit.rate = -reg.slope;
  fit.intercept = std::exp(reg.intercept);
  fit.r_squared = reg.r_squared;
  fit.non_decaying = reg.slope >= 0.0;
  return fit;
}

PowerLawFit fit_powerlaw_loglog(const Histogram& hist, double xmin, double min_bin_count) {
  if (!(xmin > 0.0)) throw ConfigError("power-law xmin must be positive");
  std::vector<double> log_center, log_density;
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    if (hist.densities[i] <= 0.0 || hist.bin_center(i) < xmin ||
        hist.counts[i] < min_bin_count)
      continue;
    log_center.push_back(std::log(hist.bin_center(i)));
    log_density.push_back(std::log(hist.densities[i]));
  }
  if (log_center.size() < 3)
    throw DataError("power-law fit needs at least 3 positive-density bins above xmin");

  const auto reg = stats::linear_regression(log_center, log_density);
  PowerLawFit fit;
  fit.exponent = -reg.slope;
  fit.prefactor = std::exp(reg.intercept);
  fit.xmin = xmin;
  fit.r_squared = reg.r_squared;
  fit.degenerate = !(fit.exponent > 0.0);
  return fit;
}

double default_powerlaw_xmin(const Histogram& hist) {
  double fallback = 0.0;
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    const double center = hist.bin_center(i);
    if (center <= 0.0) continue;
    if (fallback == 0.0) fallback = center;
    if (center >= 1.0) return center;
  }
  if (fallback == 0.0) throw DataError("histogram has no positive bin centers");
  return fallback;
}

}  // namespace velo::dist
