#include "velo/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "velo/errors.hpp"
#include "velo/stats.hpp"

namespace velo::dist {

BinningSpec BinningSpec::parse(const std::string& text) {
  if (text == "auto") return automatic();
  if (text.rfind("fixed:", 0) == 0) {
    const double w = std::stod(text.substr(6));
    if (!(w > 0.0)) throw ConfigError("fixed bin width must be positive");
    return fixed_width(w);
  }
  if (text.rfind("log:", 0) == 0) {
    const long n = std::stol(text.substr(4));
    if (n < 2) throw ConfigError("log binning needs at least 2 bins");
    return log_bins(static_cast<std::size_t>(n));
  }
  throw ConfigError("unrecognized binning spec '" + text + "' (auto | fixed:W | log:N)");
}

std::string BinningSpec::str() const {
  switch (kind) {
    case Kind::Auto:
      return "auto";
    case Kind::FixedWidth:
      return "fixed:" + std::to_string(width);
    case Kind::Log:
      return "log:" + std::to_string(n_bins);
  }
  return "auto";
}

namespace {

double freedman_diaconis_width(const SampleSet& samples, double lo, double hi) {
  const double q1 = stats::weighted_quantile(samples.values, samples.weights, 0.25);
  const double q3 = stats::weighted_quantile(samples.values, samples.weights, 0.75);
  const double iqr = q3 - q1;
  double width = 2.0 * iqr / std::cbrt(static_cast<double>(samples.size()));
  if (!(width > 0.0)) width = (hi - lo) / std::ceil(std::sqrt(static_cast<double>(samples.size())));
  if (!(width > 0.0)) width = 1.0;

  bool integral = true;
  for (double v : samples.values) {
    if (v != std::floor(v)) {
      integral = false;
      break;
    }
  }
  if (integral) width = std::max(1.0, std::round(width));
  return width;
}

}  // namespace

Histogram build_histogram(const SampleSet& samples, const BinningSpec& binning) {
  samples.validate();
  if (samples.size() < 2) throw DataError("histogram needs at least 2 samples");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double positive_lo = std::numeric_limits<double>::infinity();
  for (double v : samples.values) {
    if (!std::isfinite(v)) throw DataError("histogram input contains a non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (v > 0.0) positive_lo = std::min(positive_lo, v);
  }
  if (lo == hi) throw DataError("histogram needs at least 2 distinct values");

  Histogram hist;
  switch (binning.kind) {
    case BinningSpec::Kind::FixedWidth:
    case BinningSpec::Kind::Auto: {
      const double width = binning.kind == BinningSpec::Kind::FixedWidth
                               ? binning.width
                               : freedman_diaconis_width(samples, lo, hi);
      if (!(width > 0.0)) throw ConfigError("bin width must be positive");
      const auto bins = static_cast<std::size_t>(std::floor((hi - lo) / width)) + 1;
      hist.bin_edges.resize(bins + 1);
      for (std::size_t i = 0; i <= bins; ++i)
        hist.bin_edges[i] = lo + width * static_cast<double>(i);
      break;
    }
    case BinningSpec::Kind::Log: {
      if (!(positive_lo < hi))
        throw DataError("log binning needs at least 2 distinct positive values");
      const std::size_t bins = binning.n_bins;
      const double ratio = hi / positive_lo;
      hist.bin_edges.resize(bins + 1);
      for (std::size_t i = 0; i <= bins; ++i)
        hist.bin_edges[i] =
            positive_lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(bins));
      hist.bin_edges.back() = hi;  // keep the top edge exact
      break;
    }
  }

  const std::size_t bins = hist.bin_edges.size() - 1;
  hist.counts.assign(bins, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = samples.values[i];
    if (v < hist.bin_edges.front() || v > hist.bin_edges.back()) continue;
    auto it = std::upper_bound(hist.bin_edges.begin(), hist.bin_edges.end(), v);
    std::size_t bin = static_cast<std::size_t>(it - hist.bin_edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    if (bin >= bins) bin = bins - 1;  // the top edge is closed
    hist.counts[bin] += samples.weighted() ? samples.weights[i] : 1.0;
  }

  hist.total_weight = 0.0;
  for (double c : hist.counts) hist.total_weight += c;
  if (!(hist.total_weight > 0.0)) throw DataError("histogram has no in-range mass");

  hist.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    hist.densities[i] = hist.counts[i] / (hist.total_weight * hist.bin_width(i));
  return hist;
}

}  // namespace velo::dist
