#include "velo/velocity.hpp"

#include <cmath>

#include "velo/errors.hpp"

namespace velo::velocity {

std::string Method::label() const {
  switch (kind) {
    case Kind::GroundTruth:
      return "ground-truth";
    case Kind::F0:
      return "f0";
    case Kind::Exponent:
      return trend_proxy ? "exponent (trend proxy)" : "exponent";
    case Kind::Corrected:
      return "corrected(order=" + std::to_string(order) + ",dt=" + std::to_string(delta_t) + ")";
    case Kind::LifespanMean:
      return "lifespan-mean";
  }
  return "unknown";
}

Estimate ground_truth(double volume, double money_supply, double window) {
  if (!(money_supply > 0.0)) throw ConfigError("ground truth velocity needs a positive supply");
  if (!(window > 0.0)) throw ConfigError("ground truth velocity needs a positive window");
  if (volume < 0.0) throw ConfigError("volume must be non-negative");
  Estimate e;
  e.method.kind = Method::Kind::GroundTruth;
  e.value = volume / (money_supply * window);
  e.inputs_digest = "volume/(supply*window)";
  return e;
}

Estimate from_f0(const dist::ExponentialFit& fit) {
  if (fit.non_decaying) throw DataError("f0 on a non-decaying exponential fit");
  Estimate e;
  e.method.kind = Method::Kind::F0;
  e.value = fit.intercept;
  e.inputs_digest = "exponential fit (" + dist::fit_method_name(fit.method) + ")";
  return e;
}

Estimate from_f0(const dist::PdfModel& model) {
  if (model.kind() == dist::PdfModel::Kind::PowerLaw)
    throw DataError("power-law density diverges at zero; use the exponent method");
  Estimate e;
  e.method.kind = Method::Kind::F0;
  e.value = model.value(0.0);
  e.inputs_digest = model.kind() == dist::PdfModel::Kind::Exponential ? "exponential model"
                                                                      : "tabulated model";
  return e;
}

Estimate from_exponent(const dist::ExponentialFit& fit) {
  if (fit.non_decaying) throw DataError("exponent on a non-decaying exponential fit");
  Estimate e;
  e.method.kind = Method::Kind::Exponent;
  e.value = fit.rate;
  e.inputs_digest = "exponential fit (" + dist::fit_method_name(fit.method) + ")";
  return e;
}

Estimate from_exponent(const dist::PowerLawFit& fit) {
  Estimate e;
  e.method.kind = Method::Kind::Exponent;
  e.method.trend_proxy = true;
  e.value = fit.exponent;
  e.inputs_digest = "power-law fit";
  return e;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

/// One-sided forward difference of the i-th derivative at 0 with step h.
double forward_difference_at_zero(const dist::PdfModel& model, int order, double h) {
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    const double sign = ((order - j) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * model.value(static_cast<double>(j) * h);
    binom *= static_cast<double>(order - j) / static_cast<double>(j + 1);
  }
  return sum / std::pow(h, order);
}

double derivative_at_zero(const dist::PdfModel& model, int order,
                          const CorrectionParams& params) {
  if (model.kind() == dist::PdfModel::Kind::PowerLaw)
    throw DataError("power-law derivatives diverge at zero");
  if (params.source == CorrectionParams::DerivativeSource::FiniteDifference ||
      (model.kind() == dist::PdfModel::Kind::Tabulated && order > 1)) {
    if (!(params.fd_step > 0.0)) throw ConfigError("finite-difference step must be positive");
    return forward_difference_at_zero(model, order, params.fd_step);
  }
  return model.derivative(0.0, order);
}

double derivative_at_tail(const dist::PdfModel& model, int order, double x_tail,
                          const CorrectionParams& params) {
  if (model.kind() == dist::PdfModel::Kind::Exponential) return model.derivative(x_tail, order);
  // Backward differences keep the stencil inside the grid.
  const double h = params.fd_step > 0.0 ? params.fd_step : 1.0;
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    sum += sign * binom * model.value(x_tail - static_cast<double>(j) * h);
    binom *= static_cast<double>(order - j) / static_cast<double>(j + 1);
  }
  return sum / std::pow(h, order);
}

}  // namespace

Estimate corrected(const dist::PdfModel& model, const CorrectionParams& params) {
  if (params.order < 1) throw ConfigError("correction order must be at least 1");
  if (params.order > 5)
    throw ConfigError("correction order is capped at 5; higher derivatives from data are noise");
  if (!(params.delta_t > 0.0)) throw ConfigError("delta_t must be positive");

  Estimate e;
  e.method.kind = Method::Kind::Corrected;
  e.method.order = params.order;
  e.method.delta_t = params.delta_t;
  e.value = from_f0(model).value;
  e.inputs_digest = "corrected from pdf model";

  if (params.order == 1) return e;  // empty correction sum

  const double x_tail = model.support_max();
  const double f0 = e.value;
  for (int i = 1; i < params.order; ++i) {
    const double fi0 = derivative_at_zero(model, i, params);
    const double fi_tail = derivative_at_tail(model, i, x_tail, params);
    const double scale = std::abs(fi0) > 0.0
                             ? std::abs(fi0)
                             : std::abs(f0) / std::pow(x_tail, static_cast<double>(i));
    if (std::abs(fi_tail) >= 1e-3 * scale)
      throw DataError("tail derivative of order " + std::to_string(i) +
                      " does not vanish; correction formula is invalid for this model");
    const double term =
        -std::pow(params.delta_t, static_cast<double>(i)) / factorial(i + 1) * fi0;
    e.correction_terms.push_back(term);
    e.value += term;
  }
  return e;
}

Estimate from_lifespans(const SampleSet& samples) {
  samples.validate();
  if (samples.size() < 2) throw DataError("lifespan velocity needs at least 2 samples");
  const double mean = samples.weighted_mean();
  if (!(mean > 0.0)) throw DataError("lifespan velocity on all-zero samples");

  Estimate e;
  e.method.kind = Method::Kind::LifespanMean;
  e.value = 1.0 / mean;
  e.inputs_digest = "lifespan sample mean";

  // Delta method: Var(1/m) ~ Var(m)/m^4 with an effective n for weights.
  double wsum = 0.0, w2sum = 0.0, var = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = samples.weighted() ? samples.weights[i] : 1.0;
    wsum += w;
    w2sum += w * w;
    var += w * (samples.values[i] - mean) * (samples.values[i] - mean);
  }
  var /= wsum;
  const double n_eff = wsum * wsum / w2sum;
  if (n_eff > 1.0 && var > 0.0)
    e.std_error = std::sqrt(var / n_eff) / (mean * mean);
  return e;
}

}  // namespace velo::velocity
