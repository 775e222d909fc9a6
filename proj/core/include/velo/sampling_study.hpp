#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "velo/histogram.hpp"
#include "velo/sample_set.hpp"
#include "velo/velocity.hpp"

namespace velo::study {

enum class Estimator { F0, Exponent, LifespanMean };

Estimator estimator_from_name(const std::string& name);
std::string estimator_name(Estimator e);

struct StudyConfig {
  std::vector<double> ratios = {0.015, 0.03, 0.05, 0.1, 0.2, 0.3};
  int repetitions = 10;
  Estimator estimator = Estimator::Exponent;
  std::uint64_t rng_seed = 1;
  dist::BinningSpec binning = dist::BinningSpec::automatic();
  // Part of the histogram policy for the f0 estimator: bins with fewer
  // weighted counts are left out of the log-linear regression.
  double f0_min_bin_count = 0.0;

  void validate() const;
};

struct StudyRow {
  double ratio = 0.0;
  double mean_velocity = 0.0;
  double std_velocity = 0.0;
  std::size_t n_samples = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;  // sorted by ratio
  velocity::Estimate baseline;
};

/// Estimates velocity from random subsamples of the holding times at each
/// ratio, repeating with independent substreams and aggregating mean and
/// standard deviation. Subsamples are drawn without replacement and every
/// substream is keyed by (seed, ratio, repetition), so results are
/// deterministic and insensitive to the ratio grid's composition.
StudyResult run_study(const SampleSet& samples, const velocity::Estimate& baseline,
                      const StudyConfig& config);

/// CSV rendering: "ratio,mean,std,n,baseline", rows in ascending ratio order.
std::string emit_study_csv(const StudyResult& result);

}  // namespace velo::study
