#pragma once

#include <string>

#include "velo/histogram.hpp"
#include "velo/sample_set.hpp"

namespace velo::dist {

enum class FitMethod { Mle, LogLinear };

inline std::string fit_method_name(FitMethod m) {
  return m == FitMethod::Mle ? "mle" : "log-linear";
}

/// Fitted exponential pdf f(x) = rate * exp(-rate * x). For the MLE route the
/// intercept equals the rate by construction. A log-linear fit with a
/// non-negative slope is returned with non_decaying set instead of failing;
/// such a fit must not be used as a velocity.
struct ExponentialFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  FitMethod method = FitMethod::Mle;
  bool non_decaying = false;
};

/// Fitted power-law pdf f(x) = prefactor * x^(-exponent) for x >= xmin.
/// degenerate marks a fit whose slope came out non-decaying.
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double xmin = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;
};

/// Maximum-likelihood exponential fit: rate = 1 / weighted mean. r_squared is
/// evaluated in log space against an auto-binned histogram of the same
/// samples (0 when the samples cannot be binned).
ExponentialFit fit_exponential_mle(const SampleSet& samples);

/// Ordinary least squares of ln(density) on bin centers over positive-density
/// bins with counts >= min_bin_count. Needs at least 3 such bins.
ExponentialFit fit_exponential_loglinear(const Histogram& hist, double min_bin_count = 0.0);

/// Ordinary least squares of ln(density) on ln(center) over positive-density
/// bins with center >= xmin and counts >= min_bin_count. Needs at least 3
/// such bins.
PowerLawFit fit_powerlaw_loglog(const Histogram& hist, double xmin,
                                double min_bin_count = 0.0);

/// Default power-law fitting threshold: the smallest positive bin center
/// >= 1 time unit, falling back to the smallest positive center.
double default_powerlaw_xmin(const Histogram& hist);

}  // namespace velo::dist
