// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_SCHEDULE_HPP
#define SEERL_SCHEDULE_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "seerl/errors.hpp"
#include "seerl/rng.hpp"

namespace seerl {

/// Cyclic cosine-annealed learning-rate schedule.
///
///   alpha(t) = (alpha0 / 2) * (cos(pi * ((t-1) mod L) / L) + 1),
///   L = ceil(T / M).
///
/// Each of the M cycles starts at alpha0 and anneals toward (but never
/// exactly reaching) zero; a snapshot is due at the last step of each
/// cycle.
struct ScheduleSpec {
  double alpha0 = 0.0;
  std::uint64_t total_steps = 0; // T
  std::uint64_t num_cycles = 0;  // M

  std::uint64_t cycle_length() const {
    return (total_steps + num_cycles - 1) / num_cycles; // ceil(T/M)
  }
};

inline double lr_at(const ScheduleSpec& spec, std::uint64_t t) {
  if (t < 1 || t > spec.total_steps)
    throw OutOfRangeStep("step " + std::to_string(t) + " outside [1, " +
                         std::to_string(spec.total_steps) + "]");
  const std::uint64_t cycle_len = spec.cycle_length();
  const std::uint64_t phase = (t - 1) % cycle_len;
  const double pi = 3.14159265358979323846264338327950288;
  return 0.5 * spec.alpha0 *
         (std::cos(pi * static_cast<double>(phase) /
                   static_cast<double>(cycle_len)) +
          1.0);
}

/// True exactly at cycle ends; a truncated final cycle still snapshots at
/// t = T, so a full run yields exactly M true instants.
inline bool snapshot_due(const ScheduleSpec& spec, std::uint64_t t) {
  if (t < 1 || t > spec.total_steps) return false;
  if (t == spec.total_steps) return true;
  return t % spec.cycle_length() == 0;
}

/// Random gradient injection used by the B3 baseline: each parameter is
/// decremented by learning_rate * g, g ~ N(0, sigma^2) i.i.d.
inline void random_perturb(std::vector<double>& params, double sigma,
                           double learning_rate, Rng& rng) {
  if (sigma == 0.0) return;
  for (double& p : params) p -= learning_rate * rng.normal(0.0, sigma);
}

} // namespace seerl

#endif // SEERL_SCHEDULE_HPP
