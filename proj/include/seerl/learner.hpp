// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_LEARNER_HPP
#define SEERL_LEARNER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "seerl/env.hpp"
#include "seerl/errors.hpp"
#include "seerl/rng.hpp"

namespace seerl {

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;

/// One shared tanh hidden layer, a policy head (categorical logits for
/// discrete spaces, diagonal-Gaussian mean plus state-independent log-std
/// for continuous) and a scalar value head. Parameters live in one flat
/// vector so snapshots and finite-difference probes stay trivial.
struct Architecture {
  int state_dim = 0;
  int hidden = 64;
  bool discrete = true;
  int action_dim = 0; // number of actions, or continuous dimension k

  int policy_out() const { return action_dim; }

  // Layout: W1 | b1 | Wp | bp | [log_std] | Wv | bv
  std::size_t w1_off() const { return 0; }
  std::size_t b1_off() const { return static_cast<std::size_t>(hidden) * state_dim; }
  std::size_t wp_off() const { return b1_off() + hidden; }
  std::size_t bp_off() const { return wp_off() + static_cast<std::size_t>(policy_out()) * hidden; }
  std::size_t ls_off() const { return bp_off() + policy_out(); }
  std::size_t wv_off() const { return ls_off() + (discrete ? 0 : action_dim); }
  std::size_t bv_off() const { return wv_off() + hidden; }
  std::size_t param_count() const { return bv_off() + 1; }

  std::string describe() const {
    return "mlp:v1;in=" + std::to_string(state_dim) +
           ";hidden=" + std::to_string(hidden) +
           ";head=" + (discrete ? "categorical" : "gaussian") +
           ";out=" + std::to_string(action_dim);
  }

  /// FNV-1a over the architecture description.
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : describe()) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

  static Architecture for_env(const MdpSpec& spec, int hidden = 64) {
    Architecture arch;
    arch.state_dim = spec.state_dim;
    arch.hidden = hidden;
    if (const auto* d = std::get_if<DiscreteSpace>(&spec.action_space)) {
      arch.discrete = true;
      arch.action_dim = d->num_actions;
    } else {
      const auto& c = std::get<ContinuousSpace>(spec.action_space);
      arch.discrete = false;
      arch.action_dim = c.dim;
    }
    return arch;
  }
};

struct PolicyParams {
  Architecture arch;
  std::vector<double> values;

  static PolicyParams zeros(const Architecture& arch) {
    return {arch, std::vector<double>(arch.param_count(), 0.0)};
  }

  /// Scaled-uniform init; log-std entries start at 0 (std = 1).
  static PolicyParams init(const Architecture& arch, Rng& rng) {
    PolicyParams p = zeros(arch);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(arch.state_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
    for (std::size_t i = arch.w1_off(); i < arch.b1_off(); ++i)
      p.values[i] = rng.uniform(-s1, s1);
    for (std::size_t i = arch.wp_off(); i < arch.bp_off(); ++i)
      p.values[i] = rng.uniform(-s2, s2) * 0.01;
    for (std::size_t i = arch.wv_off(); i < arch.bv_off(); ++i)
      p.values[i] = rng.uniform(-s2, s2);
    return p;
  }
};

/// Policy output at one state: probabilities over actions (discrete) or a
/// per-dimension Gaussian (continuous).
struct ActionDistribution {
  bool discrete = true;
  std::vector<double> probs;
  std::vector<double> mean;
  std::vector<double> stddev;
};

namespace detail {

inline std::vector<double> hidden_activations(const PolicyParams& p,
                                              const std::vector<double>& state) {
  const Architecture& a = p.arch;
  if (static_cast<int>(state.size()) != a.state_dim)
    throw DimensionMismatch("state dim " + std::to_string(state.size()) +
                            ", expected " + std::to_string(a.state_dim));
  std::vector<double> h(a.hidden);
  for (int j = 0; j < a.hidden; ++j) {
    double z = p.values[a.b1_off() + j];
    const double* row = &p.values[a.w1_off() + static_cast<std::size_t>(j) * a.state_dim];
    for (int i = 0; i < a.state_dim; ++i) z += row[i] * state[i];
    h[j] = std::tanh(z);
  }
  return h;
}

inline std::vector<double> policy_head(const PolicyParams& p,
                                       const std::vector<double>& h) {
  const Architecture& a = p.arch;
  std::vector<double> z(a.policy_out());
  for (int o = 0; o < a.policy_out(); ++o) {
    double v = p.values[a.bp_off() + o];
    const double* row = &p.values[a.wp_off() + static_cast<std::size_t>(o) * a.hidden];
    for (int j = 0; j < a.hidden; ++j) v += row[j] * h[j];
    z[o] = v;
  }
  return z;
}

inline double value_head(const PolicyParams& p, const std::vector<double>& h) {
  const Architecture& a = p.arch;
  double v = p.values[a.bv_off()];
  for (int j = 0; j < a.hidden; ++j) v += p.values[a.wv_off() + j] * h[j];
  return v;
}

inline std::vector<double> softmax(std::vector<double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

} // namespace detail

inline ActionDistribution policy_distribution(const PolicyParams& params,
                                              const std::vector<double>& state) {
  const std::vector<double> h = detail::hidden_activations(params, state);
  const std::vector<double> z = detail::policy_head(params, h);
  ActionDistribution dist;
  dist.discrete = params.arch.discrete;
  if (dist.discrete) {
    dist.probs = detail::softmax(z);
  } else {
    dist.mean = z;
    dist.stddev.resize(params.arch.action_dim);
    for (int d = 0; d < params.arch.action_dim; ++d) {
      const double ls = std::clamp(params.values[params.arch.ls_off() + d],
                                   kLogStdMin, kLogStdMax);
      dist.stddev[d] = std::exp(ls);
    }
  }
  return dist;
}

inline double state_value(const PolicyParams& params,
                          const std::vector<double>& state) {
  return detail::value_head(params, detail::hidden_activations(params, state));
}

/// Signed one-step TD residual r + gamma * v_next - v_curr. Doubles as
/// the advantage estimate.
inline double value_loss(double reward, double gamma, double v_next,
                         double v_curr) {
  return reward + gamma * v_next - v_curr;
}

inline double policy_loss(double action_prob, double advantage) {
  if (!(action_prob > 0.0))
    throw NonPositiveProbability("action probability must be positive, got " +
                                 std::to_string(action_prob));
  return -std::log(action_prob) * advantage;
}

inline double total_error(double pi_loss, double v_loss, double c_v) {
  return pi_loss + v_loss * c_v;
}

struct LossBreakdown {
  double pi_loss = 0.0;
  double v_loss = 0.0; // signed TD residual
  double total = 0.0;  // pi_loss + v_loss * c_v
  double c_v = 0.0;
};

inline double log_prob_of(const ActionDistribution& dist, const Action& action) {
  if (dist.discrete) {
    const double p = dist.probs.at(static_cast<std::size_t>(action.index));
    if (!(p > 0.0)) throw NonPositiveProbability("zero probability action");
    return std::log(p);
  }
  double lp = 0.0;
  for (std::size_t d = 0; d < dist.mean.size(); ++d) {
    const double z = (action.values[d] - dist.mean[d]) / dist.stddev[d];
    lp += -0.5 * z * z - std::log(dist.stddev[d]) -
          0.5 * std::log(2.0 * 3.14159265358979323846);
  }
  return lp;
}

inline Action sample_action(const ActionDistribution& dist, Rng& rng) {
  Action a;
  if (dist.discrete) {
    const double u = rng.uniform();
    double cum = 0.0;
    a.index = static_cast<int>(dist.probs.size()) - 1;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      cum += dist.probs[i];
      if (u < cum) {
        a.index = static_cast<int>(i);
        break;
      }
    }
  } else {
    a.values.resize(dist.mean.size());
    for (std::size_t d = 0; d < dist.mean.size(); ++d)
      a.values[d] = rng.normal(dist.mean[d], dist.stddev[d]);
  }
  return a;
}

/// Deterministic action for evaluation: categorical argmax / Gaussian mean.
inline Action greedy_action(const ActionDistribution& dist) {
  Action a;
  if (dist.discrete) {
    a.index = static_cast<int>(std::max_element(dist.probs.begin(),
                                                dist.probs.end()) -
                               dist.probs.begin());
  } else {
    a.values = dist.mean;
  }
  return a;
}

struct LearnerConfig {
  int hidden = 64;
  double c_v = 0.5;
  double entropy_coef = 0.01;
};

/// One logged environment step, as consumed by train_step.
struct Sample {
  std::vector<double> state;
  Action action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// Frozen (stop-gradient) targets for one sample: the TD target for the
/// value head and the advantage for the policy head, both computed from
/// the parameters before the step.
struct FrozenTargets {
  double td_target = 0.0;
  double advantage = 0.0;
};

inline FrozenTargets freeze_targets(const PolicyParams& params,
                                    const Sample& s, double gamma) {
  const double v_curr = state_value(params, s.state);
  const double v_next = s.done ? 0.0 : state_value(params, s.next_state);
  FrozenTargets f;
  f.td_target = s.reward + gamma * v_next;
  f.advantage = f.td_target - v_curr;
  return f;
}

/// Scalar training objective for one sample with targets frozen:
///   -log pi(a|s) * A  +  0.5 * c_v * (target - V(s))^2  -  ent * H(pi(s)).
/// Smooth in the parameters, which is what the finite-difference check
/// differentiates.
inline double sample_objective(const PolicyParams& params, const Sample& s,
                               const FrozenTargets& frozen, double c_v,
                               double entropy_coef) {
  const std::vector<double> h = detail::hidden_activations(params, s.state);
  const std::vector<double> z = detail::policy_head(params, h);
  const double v = detail::value_head(params, h);

  double obj = 0.5 * c_v * (frozen.td_target - v) * (frozen.td_target - v);
  if (params.arch.discrete) {
    const std::vector<double> probs = detail::softmax(z);
    obj += -std::log(probs[static_cast<std::size_t>(s.action.index)]) *
           frozen.advantage;
    double entropy = 0.0;
    for (double p : probs) entropy -= p * std::log(p);
    obj -= entropy_coef * entropy;
  } else {
    const int k = params.arch.action_dim;
    double log_pi = 0.0, entropy = 0.0;
    for (int d = 0; d < k; ++d) {
      const double ls = params.values[params.arch.ls_off() + d];
      const double sd = std::exp(ls);
      const double zd = (s.action.values[d] - z[d]) / sd;
      log_pi += -0.5 * zd * zd - ls - 0.5 * std::log(2.0 * 3.14159265358979323846);
      entropy += ls + 0.5 * std::log(2.0 * 3.14159265358979323846 * 2.718281828459045235);
    }
    obj += -log_pi * frozen.advantage;
    obj -= entropy_coef * entropy;
  }
  return obj;
}

/// Analytic gradient of sample_objective, accumulated into grad.
inline void accumulate_sample_gradient(const PolicyParams& params,
                                       const Sample& s,
                                       const FrozenTargets& frozen, double c_v,
                                       double entropy_coef, double scale,
                                       std::vector<double>& grad) {
  const Architecture& a = params.arch;
  const std::vector<double> h = detail::hidden_activations(params, s.state);
  const std::vector<double> z = detail::policy_head(params, h);
  const double v = detail::value_head(params, h);

  // dObj/dv for the value head.
  const double g_v = -c_v * (frozen.td_target - v);

  // dObj/dz for the policy head (plus d/d log_std for continuous).
  std::vector<double> g_z(a.policy_out(), 0.0);
  std::vector<double> g_ls;
  if (a.discrete) {
    const std::vector<double> probs = detail::softmax(z);
    double entropy = 0.0;
    for (double p : probs) entropy -= p * std::log(p);
    for (int i = 0; i < a.policy_out(); ++i) {
      const double indicator = i == s.action.index ? 1.0 : 0.0;
      g_z[i] = -frozen.advantage * (indicator - probs[i]) +
               entropy_coef * probs[i] * (std::log(probs[i]) + entropy);
    }
  } else {
    g_ls.assign(a.action_dim, 0.0);
    for (int d = 0; d < a.action_dim; ++d) {
      const double ls = params.values[a.ls_off() + d];
      const double sd = std::exp(ls);
      const double diff = s.action.values[d] - z[d];
      g_z[d] = -frozen.advantage * diff / (sd * sd);
      g_ls[d] = -frozen.advantage * (diff * diff / (sd * sd) - 1.0) -
                entropy_coef;
    }
  }

  // Backprop into the shared trunk.
  std::vector<double> g_h(a.hidden, 0.0);
  for (int o = 0; o < a.policy_out(); ++o) {
    const double* row = &params.values[a.wp_off() + static_cast<std::size_t>(o) * a.hidden];
    for (int j = 0; j < a.hidden; ++j) g_h[j] += g_z[o] * row[j];
  }
  for (int j = 0; j < a.hidden; ++j)
    g_h[j] += g_v * params.values[a.wv_off() + j];

  for (int o = 0; o < a.policy_out(); ++o) {
    double* wrow = &grad[a.wp_off() + static_cast<std::size_t>(o) * a.hidden];
    for (int j = 0; j < a.hidden; ++j) wrow[j] += scale * g_z[o] * h[j];
    grad[a.bp_off() + o] += scale * g_z[o];
  }
  if (!a.discrete)
    for (int d = 0; d < a.action_dim; ++d)
      grad[a.ls_off() + d] += scale * g_ls[d];
  for (int j = 0; j < a.hidden; ++j)
    grad[a.wv_off() + j] += scale * g_v * h[j];
  grad[a.bv_off()] += scale * g_v;

  for (int j = 0; j < a.hidden; ++j) {
    const double g_pre = g_h[j] * (1.0 - h[j] * h[j]);
    double* wrow = &grad[a.w1_off() + static_cast<std::size_t>(j) * a.state_dim];
    for (int i = 0; i < a.state_dim; ++i)
      wrow[i] += scale * g_pre * s.state[i];
    grad[a.b1_off() + j] += scale * g_pre;
  }
}

/// Mean-objective gradient over a batch with per-sample frozen targets.
inline std::vector<double> batch_gradient(const PolicyParams& params,
                                          const std::vector<Sample>& batch,
                                          const std::vector<FrozenTargets>& frozen,
                                          double c_v, double entropy_coef) {
  std::vector<double> grad(params.values.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    accumulate_sample_gradient(params, batch[i], frozen[i], c_v, entropy_coef,
                               scale, grad);
    for (double g : grad)
      if (!std::isfinite(g)) throw NonFiniteGradient(i);
  }
  return grad;
}

struct TrainStepResult {
  PolicyParams params;
  std::vector<LossBreakdown> losses;
};

/// One plain gradient-descent step on the mean training objective. The
/// returned LossBreakdown entries are the signed per-sample compositions
/// used by policy selection, not the (squared) update objective.
inline TrainStepResult train_step(const PolicyParams& params,
                                  const std::vector<Sample>& batch,
                                  double learning_rate, double gamma,
                                  const LearnerConfig& cfg) {
  if (batch.empty()) throw Error("train_step: empty batch");

  std::vector<FrozenTargets> frozen(batch.size());
  std::vector<LossBreakdown> losses(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    frozen[i] = freeze_targets(params, batch[i], gamma);
    const ActionDistribution dist = policy_distribution(params, batch[i].state);
    LossBreakdown& lb = losses[i];
    lb.c_v = cfg.c_v;
    lb.pi_loss = -log_prob_of(dist, batch[i].action) * frozen[i].advantage;
    lb.v_loss = frozen[i].advantage; // signed one-step value residual
    lb.total = total_error(lb.pi_loss, lb.v_loss, lb.c_v);
  }

  TrainStepResult result{params, std::move(losses)};
  if (learning_rate == 0.0) return result;

  const std::vector<double> grad =
      batch_gradient(params, batch, frozen, cfg.c_v, cfg.entropy_coef);
  for (std::size_t i = 0; i < grad.size(); ++i)
    result.params.values[i] -= learning_rate * grad[i];

  // Keep stored log-std within its clamp range so the forward pass stays
  // smooth in the parameters.
  const Architecture& a = params.arch;
  if (!a.discrete)
    for (int d = 0; d < a.action_dim; ++d) {
      double& ls = result.params.values[a.ls_off() + d];
      ls = std::clamp(ls, kLogStdMin, kLogStdMax);
    }
  return result;
}

} // namespace seerl

#endif // SEERL_LEARNER_HPP
