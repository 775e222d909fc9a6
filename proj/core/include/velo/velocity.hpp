#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "velo/pdf_model.hpp"
#include "velo/sample_set.hpp"

namespace velo::velocity {

struct Method {
  enum class Kind { GroundTruth, F0, Exponent, Corrected, LifespanMean };
  Kind kind = Kind::GroundTruth;
  int order = 0;          // Corrected
  double delta_t = 0.0;   // Corrected
  bool trend_proxy = false;  // Exponent from a power-law fit

  std::string label() const;
};

/// A velocity value tagged with how it was obtained.
struct Estimate {
  double value = 0.0;
  Method method;
  std::string inputs_digest;
  std::optional<double> std_error;
  std::vector<double> correction_terms;  // signed contributions, order 1 upward
};

struct CorrectionParams {
  double delta_t = 1.0;
  int order = 1;  // 1 reduces to the plain f(0) estimate; capped at 5
  enum class DerivativeSource { AnalyticFromFit, FiniteDifference } source =
      DerivativeSource::AnalyticFromFit;
  double fd_step = 1.0;  // forward-difference step at 0; keep >= the bin width
};

/// Directly measured velocity volume / (money_supply * window).
Estimate ground_truth(double volume, double money_supply, double window);

/// V = f(0): the fit intercept (log-linear) or rate (MLE).
Estimate from_f0(const dist::ExponentialFit& fit);

/// V = f(0) by evaluating a pdf model at zero. Power-law models diverge at
/// zero and raise DataError directing the caller to the exponent method.
Estimate from_f0(const dist::PdfModel& model);

/// Exponential fits yield the rate (a true velocity); power-law fits yield
/// the exponent flagged as a trend proxy.
Estimate from_exponent(const dist::ExponentialFit& fit);
Estimate from_exponent(const dist::PowerLawFit& fit);

/// Taylor-corrected estimate
///   V = f(0) - Sum_{i=1}^{order-1} dt^i / (i+1)! * f^(i)(0),
/// valid when the tail derivatives vanish; checked numerically at the
/// model's largest representable point.
Estimate corrected(const dist::PdfModel& model, const CorrectionParams& params);

/// V = 1 / weighted mean lifespan, with a delta-method standard error.
Estimate from_lifespans(const SampleSet& samples);

}  // namespace velo::velocity
