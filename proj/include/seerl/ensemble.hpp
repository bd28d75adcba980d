// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_ENSEMBLE_HPP
#define SEERL_ENSEMBLE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "seerl/env.hpp"
#include "seerl/errors.hpp"
#include "seerl/rng.hpp"

namespace seerl {

enum class Strategy { Majority, Average, Binning, DensitySelect, Elimination };

inline Strategy strategy_from_name(const std::string& name) {
  if (name == "majority") return Strategy::Majority;
  if (name == "average") return Strategy::Average;
  if (name == "binning") return Strategy::Binning;
  if (name == "dbs") return Strategy::DensitySelect;
  if (name == "ste") return Strategy::Elimination;
  throw ConfigError("unknown ensemble strategy: " + name);
}

inline std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Majority: return "majority";
    case Strategy::Average: return "average";
    case Strategy::Binning: return "binning";
    case Strategy::DensitySelect: return "dbs";
    case Strategy::Elimination: return "ste";
  }
  return "?";
}

/// Most-voted action; ties resolved uniformly at random among the tied
/// maximal actions.
inline int majority_vote(const std::vector<int>& actions, Rng& rng) {
  if (actions.empty()) throw Error("majority_vote: empty action list");
  const int max_action = *std::max_element(actions.begin(), actions.end());
  std::vector<int> counts(static_cast<std::size_t>(max_action) + 1, 0);
  for (int a : actions) counts[static_cast<std::size_t>(a)]++;
  const int best = *std::max_element(counts.begin(), counts.end());
  std::vector<int> tied;
  for (std::size_t a = 0; a < counts.size(); ++a)
    if (counts[a] == best) tied.push_back(static_cast<int>(a));
  if (tied.size() == 1) return tied[0];
  return tied[rng.uniform_index(tied.size())];
}

/// Componentwise arithmetic mean.
inline std::vector<double> average(const std::vector<std::vector<double>>& actions) {
  if (actions.empty()) throw Error("average: empty action list");
  std::vector<double> out(actions[0].size(), 0.0);
  for (const auto& a : actions)
    for (std::size_t d = 0; d < out.size(); ++d) out[d] += a[d];
  for (double& v : out) v /= static_cast<double>(actions.size());
  return out;
}

/// Continuous analogue of majority voting: per dimension, split
/// [low, high] into n_bins equal bins, take the densest bin (ties random)
/// and return the mean of its members.
inline std::vector<double> bin_vote(const std::vector<std::vector<double>>& actions,
                                    const ContinuousSpace& space, int n_bins,
                                    Rng& rng) {
  if (actions.empty()) throw Error("bin_vote: empty action list");
  if (n_bins < 1) throw Error("bin_vote: n_bins must be >= 1");
  std::vector<double> out(space.dim, 0.0);
  for (int d = 0; d < space.dim; ++d) {
    const double lo = space.low[d], hi = space.high[d];
    const double width = (hi - lo) / n_bins;
    std::vector<int> counts(static_cast<std::size_t>(n_bins), 0);
    std::vector<double> sums(static_cast<std::size_t>(n_bins), 0.0);
    for (const auto& a : actions) {
      int b = static_cast<int>((a[d] - lo) / width);
      b = std::clamp(b, 0, n_bins - 1); // a[d] == hi lands in the last bin
      counts[static_cast<std::size_t>(b)]++;
      sums[static_cast<std::size_t>(b)] += a[d];
    }
    const int best = *std::max_element(counts.begin(), counts.end());
    std::vector<int> tied;
    for (int b = 0; b < n_bins; ++b)
      if (counts[static_cast<std::size_t>(b)] == best) tied.push_back(b);
    const int chosen =
        tied.size() == 1 ? tied[0]
                         : tied[rng.uniform_index(tied.size())];
    out[d] = sums[static_cast<std::size_t>(chosen)] /
             counts[static_cast<std::size_t>(chosen)];
  }
  return out;
}

/// Parzen-window density selection: d_i = sum_j exp(-||a_i - a_j||^2 / h^2)
/// (self-term included); returns the densest candidate, lowest index on
/// ties.
inline std::vector<double> density_select(const std::vector<std::vector<double>>& actions,
                                          double h) {
  if (actions.empty()) throw Error("density_select: empty action list");
  if (!(h > 0.0)) throw Error("density_select: window width must be positive");
  std::size_t best = 0;
  double best_density = -1.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    double density = 0.0;
    for (std::size_t j = 0; j < actions.size(); ++j) {
      double sq = 0.0;
      for (std::size_t l = 0; l < actions[i].size(); ++l) {
        const double diff = actions[i][l] - actions[j][l];
        sq += diff * diff;
      }
      density += std::exp(-sq / (h * h));
    }
    if (density > best_density) {
      best_density = density;
      best = i;
    }
  }
  return actions[best];
}

/// Selection through elimination: repeatedly drop the candidate farthest
/// (Euclidean) from the current mean until two remain, then average them.
/// Distance ties eliminate the higher index.
inline std::vector<double> select_through_elimination(
    std::vector<std::vector<double>> actions) {
  if (actions.empty()) throw Error("ste: empty action list");
  while (actions.size() > 2) {
    const std::vector<double> mean = average(actions);
    std::size_t worst = 0;
    double worst_dist = -1.0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      double sq = 0.0;
      for (std::size_t d = 0; d < mean.size(); ++d) {
        const double diff = actions[i][d] - mean[d];
        sq += diff * diff;
      }
      if (sq >= worst_dist) { // >= keeps the highest tied index
        worst_dist = sq;
        worst = i;
      }
    }
    actions.erase(actions.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  return average(actions);
}

struct CombinerConfig {
  int n_bins = 5;
  double parzen_h = 0.0001;
};

/// Dispatch one strategy over candidate actions for a single state.
inline Action combine_actions(Strategy strategy,
                              const std::vector<Action>& candidates,
                              const ActionSpace& space,
                              const CombinerConfig& cfg, Rng& rng) {
  if (candidates.empty()) throw Error("combine_actions: no candidates");
  const bool discrete = std::holds_alternative<DiscreteSpace>(space);
  Action out;
  if (strategy == Strategy::Majority) {
    if (!discrete)
      throw StrategySpaceMismatch("majority voting needs a discrete space");
    std::vector<int> idx;
    idx.reserve(candidates.size());
    for (const auto& c : candidates) idx.push_back(c.index);
    out.index = majority_vote(idx, rng);
    return out;
  }
  if (discrete)
    throw StrategySpaceMismatch(strategy_name(strategy) +
                                " needs a continuous space");
  std::vector<std::vector<double>> vals;
  vals.reserve(candidates.size());
  for (const auto& c : candidates) vals.push_back(c.values);
  switch (strategy) {
    case Strategy::Average:
      out.values = average(vals);
      break;
    case Strategy::Binning:
      out.values = bin_vote(vals, std::get<ContinuousSpace>(space), cfg.n_bins, rng);
      break;
    case Strategy::DensitySelect:
      out.values = density_select(vals, cfg.parzen_h);
      break;
    case Strategy::Elimination:
      out.values = select_through_elimination(vals);
      break;
    default:
      throw StrategySpaceMismatch("unhandled strategy");
  }
  return out;
}

} // namespace seerl

#endif // SEERL_ENSEMBLE_HPP
