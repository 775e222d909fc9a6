#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace velo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable substream seed derived from a root seed and up to three tags.
/// Only the (root, tags) tuple matters, never the call site, so adding new
/// substreams does not perturb existing ones.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x517cc1b727220a95ULL;
  h ^= splitmix64(s);
  s ^= b + 0x2545f4914f6cdd1dULL;
  h ^= splitmix64(s);
  s ^= c + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  return h;
}

/// Deterministic random stream (xoshiro256++). The generator and all derived
/// draws are pinned here rather than delegated to <random> distributions, so
/// seeded runs reproduce bit-identically across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Bitmask rejection keeps the draw unbiased for every bound.
    const std::uint64_t mask = mask_for(bound);
    std::uint64_t v;
    do {
      v = next() & mask;
    } while (v >= bound);
    return v;
  }

  /// Uniform real in [0, 1).
  double unit_co() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform real in (0, 1].
  double unit_oc() { return 1.0 - unit_co(); }

  /// Exponentially distributed draw with the given rate (> 0).
  double exponential(double rate) { return -std::log(unit_oc()) / rate; }

  /// Pareto draw with density proportional to x^(-pdf_exponent) on [xmin, inf).
  /// Requires pdf_exponent > 1.
  double pareto(double xmin, double pdf_exponent) {
    return xmin * std::pow(unit_oc(), -1.0 / (pdf_exponent - 1.0));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t mask_for(std::uint64_t bound) {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    return mask;
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace velo
