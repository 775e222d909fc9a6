#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "velo/errors.hpp"

namespace velo {

/// A collection of non-negative duration observations (holding times, ages or
/// lifespans). Weights, when present, act as frequency multipliers; an empty
/// weight vector means unit weights.
struct SampleSet {
  std::vector<double> values;
  std::string time_unit = "iteration";
  std::vector<double> weights;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  bool weighted() const { return !weights.empty(); }

  double total_weight() const {
    if (!weighted()) return static_cast<double>(values.size());
    double sum = 0.0;
    for (double w : weights) sum += w;
    return sum;
  }

  double weighted_mean() const {
    if (values.empty()) throw DataError("mean of empty sample set");
    if (!weighted()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    }
    double sum = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      sum += weights[i] * values[i];
      wsum += weights[i];
    }
    if (wsum <= 0.0) throw DataError("sample set with non-positive total weight");
    return sum / wsum;
  }

  void validate() const {
    if (weighted() && weights.size() != values.size())
      throw DataError("weights length does not match values");
    for (double v : values) {
      if (!(v >= 0.0)) throw DataError("sample set contains a negative or non-finite value");
    }
    if (weighted()) {
      double wsum = 0.0;
      for (double w : weights) {
        if (!(w >= 0.0)) throw DataError("sample set contains a negative or non-finite weight");
        wsum += w;
      }
      if (!(wsum > 0.0)) throw DataError("sample set with non-positive total weight");
    }
  }
};

}  // namespace velo
