#include "velo/pdf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "velo/errors.hpp"

namespace velo::dist {

PdfModel PdfModel::exponential(double rate) {
  if (!(rate > 0.0)) throw ConfigError("exponential rate must be positive");
  PdfModel m;
  m.kind_ = Kind::Exponential;
  m.rate_ = rate;
  return m;
}

PdfModel PdfModel::power_law(double prefactor, double exponent, double xmin) {
  if (!(prefactor > 0.0) || !(exponent > 0.0) || !(xmin > 0.0))
    throw ConfigError("power-law parameters must be positive");
  PdfModel m;
  m.kind_ = Kind::PowerLaw;
  m.prefactor_ = prefactor;
  m.exponent_ = exponent;
  m.xmin_ = xmin;
  return m;
}

PdfModel PdfModel::from_fit(const ExponentialFit& fit) {
  if (fit.non_decaying) throw DataError("cannot build a pdf from a non-decaying fit");
  return exponential(fit.rate);
}

PdfModel PdfModel::from_fit(const PowerLawFit& fit) {
  if (fit.degenerate) throw DataError("cannot build a pdf from a degenerate power-law fit");
  return power_law(fit.prefactor, fit.exponent, fit.xmin);
}

PdfModel PdfModel::tabulated(std::vector<double> grid, std::vector<double> density,
                             bool truncated) {
  if (grid.size() < 2) throw DataError("tabulated pdf needs a grid of at least 2 points");
  if (grid.size() != density.size())
    throw DataError("tabulated pdf grid and density lengths differ");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw DataError("tabulated pdf grid must be strictly increasing");
  for (double f : density)
    if (!(f >= 0.0) || !std::isfinite(f))
      throw DataError("tabulated pdf density must be finite and non-negative");

  PdfModel m;
  m.kind_ = Kind::Tabulated;
  m.truncated_ = truncated;
  m.grid_ = std::move(grid);
  m.density_ = std::move(density);

  const std::size_t n = m.grid_.size();
  m.node_derivative_.resize(n);
  m.node_derivative_.front() =
      (m.density_[1] - m.density_[0]) / (m.grid_[1] - m.grid_[0]);
  m.node_derivative_.back() =
      (m.density_[n - 1] - m.density_[n - 2]) / (m.grid_[n - 1] - m.grid_[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    m.node_derivative_[i] =
        (m.density_[i + 1] - m.density_[i - 1]) / (m.grid_[i + 1] - m.grid_[i - 1]);

  m.cumulative_.resize(n);
  m.cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    m.cumulative_[i] = m.cumulative_[i - 1] + 0.5 * (m.density_[i] + m.density_[i - 1]) *
                                                  (m.grid_[i] - m.grid_[i - 1]);
  return m;
}

PdfModel PdfModel::from_histogram(const Histogram& hist) {
  std::vector<double> grid, density;
  grid.reserve(hist.bin_count() + 2);
  density.reserve(hist.bin_count() + 2);
  for (std::size_t i = 0; i < hist.bin_count(); ++i) {
    grid.push_back(hist.bin_center(i));
    density.push_back(hist.densities[i]);
  }
  // Extend to the outer edges so the model covers the histogram's full
  // support (in particular x = 0 for age data), extrapolating the end
  // segments linearly and clamping at zero.
  if (grid.size() >= 2) {
    const double lo = hist.bin_edges.front();
    const double hi = hist.bin_edges.back();
    const double slope_lo = (density[1] - density[0]) / (grid[1] - grid[0]);
    const double slope_hi = (density[density.size() - 1] - density[density.size() - 2]) /
                            (grid[grid.size() - 1] - grid[grid.size() - 2]);
    const double f_lo = std::max(0.0, density.front() + slope_lo * (lo - grid.front()));
    const double f_hi = std::max(0.0, density.back() + slope_hi * (hi - grid.back()));
    grid.insert(grid.begin(), lo);
    density.insert(density.begin(), f_lo);
    grid.push_back(hi);
    density.push_back(f_hi);
  }
  return tabulated(std::move(grid), std::move(density));
}

std::size_t PdfModel::segment(double x) const {
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  if (i == 0) return 0;
  if (i >= grid_.size()) return grid_.size() - 2;
  return i - 1;
}

double PdfModel::value(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      return x < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * x);
    case Kind::PowerLaw:
      return x < xmin_ ? 0.0 : prefactor_ * std::pow(x, -exponent_);
    case Kind::Tabulated: {
      if (x < grid_.front() || x > grid_.back()) return 0.0;
      const std::size_t i = segment(x);
      const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return density_[i] + t * (density_[i + 1] - density_[i]);
    }
  }
  return 0.0;
}

double PdfModel::derivative(double x, int order) const {
  if (order < 1) throw ConfigError("derivative order must be at least 1");
  switch (kind_) {
    case Kind::Exponential: {
      if (x < 0.0) return 0.0;
      double d = rate_ * std::exp(-rate_ * x);
      for (int i = 0; i < order; ++i) d *= -rate_;
      return d;
    }
    case Kind::PowerLaw: {
      if (x < xmin_) return 0.0;
      double d = prefactor_ * std::pow(x, -exponent_ - static_cast<double>(order));
      for (int i = 0; i < order; ++i) d *= -(exponent_ + static_cast<double>(i));
      return d;
    }
    case Kind::Tabulated: {
      if (order != 1)
        throw DataError("tabulated pdf supports first derivatives only");
      if (x < grid_.front() || x > grid_.back()) return 0.0;
      const std::size_t i = segment(x);
      const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return node_derivative_[i] + t * (node_derivative_[i + 1] - node_derivative_[i]);
    }
  }
  return 0.0;
}

double PdfModel::cumulative(double x) const {
  switch (kind_) {
    case Kind::Exponential:
      return x <= 0.0 ? 0.0 : 1.0 - std::exp(-rate_ * x);
    case Kind::PowerLaw: {
      if (x <= xmin_) return 0.0;
      if (exponent_ == 1.0) return prefactor_ * std::log(x / xmin_);
      return prefactor_ / (exponent_ - 1.0) *
             (std::pow(xmin_, 1.0 - exponent_) - std::pow(x, 1.0 - exponent_));
    }
    case Kind::Tabulated: {
      if (x <= grid_.front()) return 0.0;
      if (x >= grid_.back()) return cumulative_.back();
      const std::size_t i = segment(x);
      const double f_at_x = value(x);
      return cumulative_[i] + 0.5 * (density_[i] + f_at_x) * (x - grid_[i]);
    }
  }
  return 0.0;
}

double PdfModel::mean() const {
  switch (kind_) {
    case Kind::Exponential:
      return 1.0 / rate_;
    case Kind::PowerLaw: {
      if (exponent_ <= 2.0) return std::numeric_limits<double>::infinity();
      return prefactor_ * std::pow(xmin_, 2.0 - exponent_) / (exponent_ - 2.0);
    }
    case Kind::Tabulated: {
      double m = 0.0;
      for (std::size_t i = 1; i < grid_.size(); ++i)
        m += 0.5 * (grid_[i] * density_[i] + grid_[i - 1] * density_[i - 1]) *
             (grid_[i] - grid_[i - 1]);
      return m;
    }
  }
  return 0.0;
}

double PdfModel::support_max() const {
  switch (kind_) {
    case Kind::Exponential:
      return 20.0 / rate_;
    case Kind::PowerLaw:
      return xmin_ * 1e6;
    case Kind::Tabulated:
      return grid_.back();
  }
  return 0.0;
}

double hazard(const PdfModel& model, double x) {
  // Analytic kinds reduce exactly; only tabulated models need differences.
  switch (model.kind()) {
    case PdfModel::Kind::Exponential:
      return model.rate();
    case PdfModel::Kind::PowerLaw:
      if (x < model.power_xmin()) throw DataError("hazard outside the power-law support");
      return model.power_exponent() / x;
    case PdfModel::Kind::Tabulated: {
      const double f = model.value(x);
      if (!(f > 0.0)) throw DataError("hazard at a point of zero density");
      return -model.derivative(x, 1) / f;
    }
  }
  throw DataError("hazard on unknown model kind");
}

namespace {

void check_transform_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw DataError("transform grid needs at least 2 points");
  if (grid.front() != 0.0) throw DataError("transform grid must start at 0");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw DataError("transform grid must be strictly increasing");
}

}  // namespace

PdfModel lifespan_from_holding(const PdfModel& holding, std::span<const double> grid) {
  check_transform_grid(grid);

  const std::size_t n = grid.size();
  std::vector<double> h(n);
  // Noisy tabulated densities can locally increase; a negative hazard
  // estimate is a noise artifact and is clamped to zero.
  for (std::size_t i = 0; i < n; ++i) h[i] = std::max(0.0, hazard(holding, grid[i]));

  std::vector<double> p(n);
  double accumulated = 0.0;  // Integral of h from 0 to grid[i]
  p[0] = h[0];
  for (std::size_t i = 1; i < n; ++i) {
    accumulated += 0.5 * (h[i] + h[i - 1]) * (grid[i] - grid[i - 1]);
    p[i] = h[i] * std::exp(-accumulated);
  }
  return PdfModel::tabulated(std::vector<double>(grid.begin(), grid.end()), std::move(p));
}

PdfModel holding_from_lifespan(const PdfModel& lifespan, std::span<const double> grid) {
  check_transform_grid(grid);

  const std::size_t n = grid.size();
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = lifespan.value(grid[i]);

  // Survival S = 1 - Integral p, then hazard p/S, then f = exp(-Integral h).
  std::vector<double> f(n, 0.0);
  bool truncated = false;
  double p_mass = 0.0;
  double h_accumulated = 0.0;
  double prev_h = p[0];  // S(0) = 1
  f[0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    p_mass += 0.5 * (p[i] + p[i - 1]) * (grid[i] - grid[i - 1]);
    const double survival = 1.0 - p_mass;
    if (!(survival > 0.0)) {
      truncated = true;
      break;
    }
    const double h = p[i] / survival;
    h_accumulated += 0.5 * (h + prev_h) * (grid[i] - grid[i - 1]);
    prev_h = h;
    f[i] = std::exp(-h_accumulated);
  }

  double norm = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    norm += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
  if (!(norm > 0.0)) throw DataError("recovered holding-time pdf has no mass");
  for (double& fi : f) fi /= norm;

  return PdfModel::tabulated(std::vector<double>(grid.begin(), grid.end()), std::move(f),
                             truncated);
}

}  // namespace velo::dist
