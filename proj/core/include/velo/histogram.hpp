#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "velo/sample_set.hpp"

namespace velo::dist {

/// Binned empirical pdf. densities are normalized so that
/// Sum densities[i] * width[i] == 1 over the binned mass.
struct Histogram {
  std::vector<double> bin_edges;  // strictly increasing, size = bins + 1
  std::vector<double> densities;
  std::vector<double> counts;  // weighted counts per bin
  double total_weight = 0.0;   // weight included in the bins

  std::size_t bin_count() const { return densities.size(); }
  double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  double bin_width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
};

struct BinningSpec {
  enum class Kind { Auto, FixedWidth, Log };
  Kind kind = Kind::Auto;
  double width = 1.0;       // FixedWidth
  std::size_t n_bins = 32;  // Log

  static BinningSpec automatic() { return {}; }
  static BinningSpec fixed_width(double w) { return {Kind::FixedWidth, w, 0}; }
  static BinningSpec log_bins(std::size_t n) { return {Kind::Log, 0.0, n}; }

  /// Parses "auto", "fixed:<width>" or "log:<bins>". Throws ConfigError.
  static BinningSpec parse(const std::string& text);
  std::string str() const;
};

/// Builds a normalized density histogram.
///
/// Fixed-width bins start at the smallest value and extend past the largest.
/// Log bins span the smallest positive value to the largest; values below the
/// first log edge are left out and the densities are normalized over the
/// included mass. Auto selects a Freedman-Diaconis style width, rounded up to
/// 1 time unit when every value is integral.
///
/// Requires at least 2 distinct finite values; throws DataError otherwise.
Histogram build_histogram(const SampleSet& samples, const BinningSpec& binning);

}  // namespace velo::dist
