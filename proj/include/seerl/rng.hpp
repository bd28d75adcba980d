// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_RNG_HPP
#define SEERL_RNG_HPP

#include <cmath>
#include <cstdint>

namespace seerl {

/// Counter-based deterministic generator (splitmix64 over a seed/counter
/// pair). Every stochastic component owns one instance; there is no global
/// random state, so a run is fully reproducible from its seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller. Consumes two draws per call; no
  /// cached spare, so the stream position stays a pure function of the
  /// call count.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  /// Derive an independent stream (for sub-runs, eval episodes, ...).
  Rng split(std::uint64_t stream) const {
    Rng r(seed_ ^ (0xd1342543de82ef95ull * (stream + 1)));
    return r;
  }

private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

} // namespace seerl

#endif // SEERL_RNG_HPP
