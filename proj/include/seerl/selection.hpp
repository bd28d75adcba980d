// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_SELECTION_HPP
#define SEERL_SELECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "seerl/ensemble.hpp"
#include "seerl/errors.hpp"
#include "seerl/learner.hpp"
#include "seerl/snapshot.hpp"

namespace seerl {

// ---------------------------------------------------------------------------
// Training log
// ---------------------------------------------------------------------------

/// One logged training step: enough to rebuild the selection problem
/// offline without touching the environment again.
struct LogRecord {
  std::uint64_t step = 0;
  std::uint64_t cycle_index = 0; // 1-based cycle of the generating policy
  std::vector<double> state;
  Action action;
  double abs_total_error = 0.0; // |pi_loss + v_loss * c_v|
};

struct TrainingLog {
  std::string env_id;
  std::vector<LogRecord> records;
};

// ---------------------------------------------------------------------------
// Divergence and error terms
// ---------------------------------------------------------------------------

/// KL(p_i || p_k). Discrete: direct summation, a zero in p_k under the
/// support of p_i is an error rather than an infinite value. Continuous:
/// closed form for diagonal Gaussians.
inline double kl_between(const ActionDistribution& dist_i,
                         const ActionDistribution& dist_k) {
  if (dist_i.discrete != dist_k.discrete)
    throw DimensionMismatch("KL between mismatched action spaces");
  double kl = 0.0;
  if (dist_i.discrete) {
    if (dist_i.probs.size() != dist_k.probs.size())
      throw DimensionMismatch("KL between different action counts");
    for (std::size_t a = 0; a < dist_i.probs.size(); ++a) {
      if (dist_i.probs[a] == 0.0) continue;
      if (dist_k.probs[a] == 0.0)
        throw ZeroSupportMismatch("KL is infinite: zero support at action " +
                                  std::to_string(a));
      kl += dist_i.probs[a] * std::log(dist_i.probs[a] / dist_k.probs[a]);
    }
  } else {
    if (dist_i.mean.size() != dist_k.mean.size())
      throw DimensionMismatch("KL between different action dimensions");
    for (std::size_t d = 0; d < dist_i.mean.size(); ++d) {
      const double si = dist_i.stddev[d], sk = dist_k.stddev[d];
      const double dm = dist_i.mean[d] - dist_k.mean[d];
      kl += std::log(sk / si) + (si * si + dm * dm) / (2.0 * sk * sk) - 0.5;
    }
  }
  return std::max(kl, 0.0);
}

/// The 0/1 indicator of a high-loss action that agrees with the ensemble
/// action. Continuous agreement is per-dimension max-norm within epsilon.
inline double weighted_error(double abs_total_error, const Action& policy_action,
                             const Action& ensemble_action, double t_err,
                             double epsilon) {
  if (abs_total_error < t_err) return 0.0;
  if (policy_action.is_discrete())
    return policy_action.index == ensemble_action.index ? 1.0 : 0.0;
  for (std::size_t d = 0; d < policy_action.values.size(); ++d)
    if (std::abs(policy_action.values[d] - ensemble_action.values[d]) >= epsilon)
      return 0.0;
  return 1.0;
}

/// b_i(s) = sum_a L(s,a) - (beta / (M-1)) * sum_{k != i} KL(pi_i(s) || pi_k(s)),
/// with the error sum taken over the actions policy i actually logged at s.
inline double build_b_vector(std::size_t policy_i,
                             const std::vector<ActionDistribution>& dists_at_state,
                             double beta, double error_sum_i) {
  const std::size_t m = dists_at_state.size();
  if (m < 2) throw Error("b-vector needs at least two policies");
  double kl_sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == policy_i) continue;
    kl_sum += kl_between(dists_at_state[policy_i], dists_at_state[k]);
  }
  return error_sum_i - beta / static_cast<double>(m - 1) * kl_sum;
}

/// B_ij = sum_s P(s) * b_i(s) * b_j(s); symmetric PSD by construction.
inline std::vector<std::vector<double>> build_B_matrix(
    const std::vector<double>& state_weights,
    const std::vector<std::vector<double>>& b_vectors) {
  const std::size_t n_states = state_weights.size();
  if (b_vectors.size() != n_states)
    throw DimensionMismatch("one b-vector per sampled state expected");
  const std::size_t m = n_states == 0 ? 0 : b_vectors[0].size();
  std::vector<std::vector<double>> B(m, std::vector<double>(m, 0.0));
  for (std::size_t s = 0; s < n_states; ++s)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        B[i][j] += state_weights[s] * b_vectors[s][i] * b_vectors[s][j];
  // Force exact symmetry against floating-point accumulation order.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) B[j][i] = B[i][j];
  return B;
}

// ---------------------------------------------------------------------------
// Simplex-constrained QP
// ---------------------------------------------------------------------------

/// Exact Euclidean projection onto {w : sum w = 1, w >= 0} (sort-based).
inline std::vector<double> project_to_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumsum += u[i];
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(x - theta, 0.0);
  return v;
}

struct SimplexQpResult {
  std::vector<double> w;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimize w' (B + ridge I) w over the probability simplex by projected
/// gradient descent with step 1 / (2 lambda_max), lambda_max estimated by
/// power iteration.
inline SimplexQpResult solve_simplex_qp(const std::vector<std::vector<double>>& B,
                                        double ridge = 1e-8,
                                        std::size_t max_iters = 10000) {
  const std::size_t m = B.size();
  if (m == 0) throw Error("empty QP");
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (B[i].size() != m) throw NonSymmetricInput("B is not square");
    for (std::size_t j = 0; j < m; ++j)
      scale = std::max(scale, std::abs(B[i][j]));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(B[i][j] - B[j][i]) > 1e-12 * std::max(scale, 1.0))
        throw NonSymmetricInput("B is not symmetric");

  auto apply = [&](const std::vector<double>& x) {
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = ridge * x[i];
      for (std::size_t j = 0; j < m; ++j) acc += B[i][j] * x[j];
      y[i] = acc;
    }
    return y;
  };
  auto objective = [&](const std::vector<double>& x) {
    const std::vector<double> y = apply(x);
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  };

  // lambda_max via power iteration (PSD, so no sign issues).
  double lambda_max = ridge;
  {
    std::vector<double> x(m, 1.0 / std::sqrt(static_cast<double>(m)));
    for (int it = 0; it < 100; ++it) {
      std::vector<double> y = apply(x);
      const double norm = std::sqrt(
          std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
      if (norm < 1e-300) break;
      lambda_max = norm;
      for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
    }
  }

  SimplexQpResult result;
  result.w.assign(m, 1.0 / static_cast<double>(m));
  if (lambda_max <= 0.0) {
    // Zero matrix: every simplex point is optimal.
    result.objective = objective(result.w);
    result.converged = true;
    return result;
  }

  const double step = 1.0 / (2.0 * lambda_max);
  double prev_obj = objective(result.w);
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const std::vector<double> grad = apply(result.w); // gradient / 2
    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i)
      next[i] = result.w[i] - step * 2.0 * grad[i];
    next = project_to_simplex(std::move(next));
    double move = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      move = std::max(move, std::abs(next[i] - result.w[i]));
    result.w = std::move(next);
    result.iterations = it;
    const double obj = objective(result.w);
    if (move < 1e-14 && std::abs(prev_obj - obj) < 1e-16 * std::max(1.0, std::abs(obj))) {
      result.converged = true;
      result.objective = obj;
      return result;
    }
    prev_obj = obj;
  }
  result.objective = prev_obj;
  result.converged = true; // fixed-point not reached, best iterate reported
  return result;
}

/// Indices of the m largest weights; ties broken toward the lower index
/// (i.e., the earlier training cycle).
inline std::vector<std::size_t> select_top_m(const std::vector<double>& w,
                                             std::size_t m) {
  if (m < 1 || m > w.size()) throw Error("select_top_m: m out of range");
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&w](std::size_t a, std::size_t b) {
    if (w[a] != w[b]) return w[a] > w[b];
    return a < b;
  });
  idx.resize(m);
  return idx;
}

/// Pairwise state-weighted KL between policies; the diagonal is exactly
/// zero and the matrix is not symmetric in general.
inline std::vector<std::vector<double>> diversity_matrix(
    const std::vector<PolicyParams>& policies,
    const std::vector<std::vector<double>>& states,
    const std::vector<double>& weights) {
  const std::size_t m = policies.size();
  std::vector<std::vector<double>> div(m, std::vector<double>(m, 0.0));
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::vector<ActionDistribution> dists(m);
    for (std::size_t i = 0; i < m; ++i)
      dists[i] = policy_distribution(policies[i], states[s]);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k) {
        if (i == k) continue;
        div[i][k] += weights[s] * kl_between(dists[i], dists[k]);
      }
  }
  return div;
}

// ---------------------------------------------------------------------------
// Problem construction from a training log
// ---------------------------------------------------------------------------

struct SelectionConfig {
  double beta = 1.0;           // diversity/performance balance, in [1, 2)
  double t_err = -1.0;         // negative: use the median |L'| of the log
  double epsilon = 0.01;       // continuous action match tolerance
  std::size_t subset_size = 3; // m
  std::size_t sample_count = 2048;
  double ridge = 1e-8;
  int grid_cells = 64; // state bins for continuous-state envs
  Strategy strategy = Strategy::Majority;
  CombinerConfig combiner;
  std::uint64_t seed = 0;
};

struct SelectionProblem {
  std::vector<std::vector<double>> sampled_states;
  std::vector<double> state_weights;
  std::vector<std::vector<double>> b_vectors; // [state][policy]
  std::vector<std::vector<double>> B;
  double t_err_used = 0.0;
};

struct SelectionReport {
  SelectionProblem problem;
  std::vector<double> w;
  std::vector<std::size_t> chosen;
  double objective = 0.0;
  std::vector<std::vector<double>> diversity;
};

namespace detail {

/// Deterministic state binning. One-hot states map to their hot index;
/// everything else quantizes each dimension into 8 levels over the range
/// observed in the log and hashes into grid_cells cells.
class StateBinner {
public:
  StateBinner(const TrainingLog& log, int grid_cells)
      : grid_cells_(grid_cells) {
    if (log.records.empty()) throw Error("empty training log");
    one_hot_ = true;
    for (const auto& rec : log.records) {
      int ones = 0;
      for (double v : rec.state) {
        if (v == 1.0)
          ++ones;
        else if (v != 0.0) {
          one_hot_ = false;
          break;
        }
      }
      if (!one_hot_ || ones != 1) {
        one_hot_ = false;
        break;
      }
    }
    if (!one_hot_) {
      const std::size_t dim = log.records[0].state.size();
      lo_.assign(dim, std::numeric_limits<double>::infinity());
      hi_.assign(dim, -std::numeric_limits<double>::infinity());
      for (const auto& rec : log.records)
        for (std::size_t d = 0; d < dim; ++d) {
          lo_[d] = std::min(lo_[d], rec.state[d]);
          hi_[d] = std::max(hi_[d], rec.state[d]);
        }
    }
  }

  std::size_t bin_of(const std::vector<double>& state) const {
    if (one_hot_) {
      for (std::size_t d = 0; d < state.size(); ++d)
        if (state[d] == 1.0) return d;
      return 0;
    }
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t d = 0; d < state.size(); ++d) {
      const double range = hi_[d] - lo_[d];
      int q = range > 0.0
                  ? static_cast<int>((state[d] - lo_[d]) / range * 8.0)
                  : 0;
      q = std::clamp(q, 0, 7);
      h ^= static_cast<std::uint64_t>(q) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h % static_cast<std::uint64_t>(grid_cells_));
  }

private:
  int grid_cells_;
  bool one_hot_ = false;
  std::vector<double> lo_, hi_;
};

} // namespace detail

/// Builds the full selection problem from the training log: sampled
/// states with empirical visitation weights, per-state b-vectors against
/// the all-policy ensemble action, and the B matrix.
inline SelectionProblem build_selection_problem(
    const std::vector<PolicyParams>& policies, const TrainingLog& log,
    const MdpSpec& mdp, const SelectionConfig& cfg) {
  const std::size_t num_policies = policies.size();
  if (num_policies < 2) throw Error("selection needs at least two policies");
  if (log.records.empty()) throw Error("empty training log");

  SelectionProblem prob;

  // Threshold: configured absolute value, or the median |L'| of the log.
  if (cfg.t_err >= 0.0) {
    prob.t_err_used = cfg.t_err;
  } else {
    std::vector<double> errs;
    errs.reserve(log.records.size());
    for (const auto& rec : log.records) errs.push_back(rec.abs_total_error);
    const std::size_t mid = errs.size() / 2;
    std::nth_element(errs.begin(), errs.begin() + static_cast<std::ptrdiff_t>(mid),
                     errs.end());
    prob.t_err_used = errs[mid];
  }

  const detail::StateBinner binner(log, cfg.grid_cells);

  // Full-log visitation counts and a representative state per bin.
  std::map<std::size_t, std::size_t> bin_counts;
  std::map<std::size_t, std::vector<double>> representative;
  std::vector<std::size_t> record_bins(log.records.size());
  for (std::size_t r = 0; r < log.records.size(); ++r) {
    const std::size_t b = binner.bin_of(log.records[r].state);
    record_bins[r] = b;
    bin_counts[b]++;
    representative.emplace(b, log.records[r].state);
  }

  // Sample records uniformly; the distinct bins they land in become the
  // state set, weighted by full-log visitation.
  Rng sample_rng(cfg.seed ^ 0x5e1ec7104b5d9a37ull);
  std::map<std::size_t, bool> picked;
  for (std::size_t i = 0; i < cfg.sample_count; ++i)
    picked[record_bins[sample_rng.uniform_index(log.records.size())]] = true;

  std::vector<std::size_t> bins;
  double weight_total = 0.0;
  for (const auto& [b, _] : picked) {
    bins.push_back(b);
    weight_total += static_cast<double>(bin_counts[b]);
  }
  std::map<std::size_t, std::size_t> bin_slot;
  for (std::size_t s = 0; s < bins.size(); ++s) {
    bin_slot[bins[s]] = s;
    prob.sampled_states.push_back(representative[bins[s]]);
    prob.state_weights.push_back(static_cast<double>(bin_counts[bins[s]]) /
                                 weight_total);
  }

  // Per-bin policy distributions and the all-policy ensemble action a_e.
  Rng tie_rng(cfg.seed ^ 0x2545f4914f6cdd1dull);
  std::vector<std::vector<ActionDistribution>> dists(bins.size());
  std::vector<Action> ensemble_actions(bins.size());
  for (std::size_t s = 0; s < bins.size(); ++s) {
    dists[s].resize(num_policies);
    std::vector<Action> candidates(num_policies);
    for (std::size_t i = 0; i < num_policies; ++i) {
      dists[s][i] = policy_distribution(policies[i], prob.sampled_states[s]);
      candidates[i] = greedy_action(dists[s][i]);
    }
    ensemble_actions[s] =
        combine_actions(cfg.strategy, candidates, mdp.action_space,
                        cfg.combiner, tie_rng);
  }

  // Error sums over the actions each policy actually logged at each bin.
  std::vector<std::vector<double>> error_sums(
      bins.size(), std::vector<double>(num_policies, 0.0));
  for (std::size_t r = 0; r < log.records.size(); ++r) {
    const auto slot = bin_slot.find(record_bins[r]);
    if (slot == bin_slot.end()) continue;
    const LogRecord& rec = log.records[r];
    if (rec.cycle_index < 1 || rec.cycle_index > num_policies) continue;
    error_sums[slot->second][rec.cycle_index - 1] +=
        weighted_error(rec.abs_total_error, rec.action,
                       ensemble_actions[slot->second], prob.t_err_used,
                       cfg.epsilon);
  }

  prob.b_vectors.assign(bins.size(), std::vector<double>(num_policies, 0.0));
  for (std::size_t s = 0; s < bins.size(); ++s)
    for (std::size_t i = 0; i < num_policies; ++i)
      prob.b_vectors[s][i] =
          build_b_vector(i, dists[s], cfg.beta, error_sums[s][i]);

  prob.B = build_B_matrix(prob.state_weights, prob.b_vectors);
  return prob;
}

/// Full selection pass: build, solve, choose the subset, and attach the
/// diversity diagnostics.
inline SelectionReport run_selection(const std::vector<PolicyParams>& policies,
                                     const TrainingLog& log, const MdpSpec& mdp,
                                     const SelectionConfig& cfg) {
  SelectionReport report;
  report.problem = build_selection_problem(policies, log, mdp, cfg);
  SimplexQpResult qp = solve_simplex_qp(report.problem.B, cfg.ridge);
  report.w = std::move(qp.w);
  report.objective = qp.objective;
  report.chosen = select_top_m(report.w, std::min(cfg.subset_size, policies.size()));
  report.diversity = diversity_matrix(policies, report.problem.sampled_states,
                                      report.problem.state_weights);
  return report;
}

} // namespace seerl

#endif // SEERL_SELECTION_HPP
