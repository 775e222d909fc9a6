#pragma once

#include <span>
#include <vector>

#include "velo/fits.hpp"

namespace velo::dist {

/// A probability density on [0, inf): analytic exponential, analytic
/// power law on [xmin, inf), or a tabulated grid with linear interpolation.
/// Supports evaluation, derivatives, cumulative mass and the first moment.
class PdfModel {
 public:
  enum class Kind { Exponential, PowerLaw, Tabulated };

  static PdfModel exponential(double rate);
  static PdfModel power_law(double prefactor, double exponent, double xmin);
  static PdfModel from_fit(const ExponentialFit& fit);
  static PdfModel from_fit(const PowerLawFit& fit);
  /// grid must be strictly increasing with at least 2 points; density >= 0.
  static PdfModel tabulated(std::vector<double> grid, std::vector<double> density,
                            bool truncated = false);
  /// Tabulated model over a histogram's bin centers.
  static PdfModel from_histogram(const Histogram& hist);

  Kind kind() const { return kind_; }
  double rate() const { return rate_; }
  double power_exponent() const { return exponent_; }
  double power_prefactor() const { return prefactor_; }
  double power_xmin() const { return xmin_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& density() const { return density_; }

  /// Set when a transform ran out of survival mass inside its grid and the
  /// result is zero beyond the truncation point.
  bool truncated() const { return truncated_; }

  double value(double x) const;

  /// Derivative of the density. Analytic kinds support any order; tabulated
  /// models support order 1 via grid finite differences (central inside,
  /// one-sided at the ends).
  double derivative(double x, int order = 1) const;

  /// Integral of the density over [0, x].
  double cumulative(double x) const;

  /// First moment. Infinite for power laws with exponent <= 2; computed by
  /// trapezoid over the grid for tabulated models.
  double mean() const;

  /// Largest point at which the model is representable: grid end for
  /// tabulated models, a deep-tail proxy for analytic ones.
  double support_max() const;

 private:
  PdfModel() = default;

  std::size_t segment(double x) const;

  Kind kind_ = Kind::Exponential;
  double rate_ = 1.0;
  double prefactor_ = 1.0;
  double exponent_ = 2.0;
  double xmin_ = 1.0;
  bool truncated_ = false;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> node_derivative_;
  std::vector<double> cumulative_;
};

/// Hazard rate -f'(x)/f(x) = p(x)/S(x). Exact for analytic kinds; finite
/// differences on the grid for tabulated models. Throws DataError where the
/// density vanishes.
double hazard(const PdfModel& model, double x);

/// Lifespan pdf p = h * S derived from a holding-time pdf f via the hazard
/// h = -f'/f and S(x) = exp(-Integral h), accumulated by trapezoid on the
/// grid. The grid must start at 0. p integrates to at most 1; the deficit is
/// the survival remaining at the grid end.
PdfModel lifespan_from_holding(const PdfModel& holding, std::span<const double> grid);

/// Holding-time pdf f recovered from a lifespan pdf p: h = p / (1 - Integral p),
/// f = f(0) * exp(-Integral h) with f(0) fixed by normalization over the grid.
/// If the survival hits zero inside the grid the result is truncated there and
/// flagged.
PdfModel holding_from_lifespan(const PdfModel& lifespan, std::span<const double> grid);

}  // namespace velo::dist
