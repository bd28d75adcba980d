// SPDX-License-Identifier: Apache-2.0
#ifndef SEERL_HARNESS_HPP
#define SEERL_HARNESS_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "seerl/ensemble.hpp"
#include "seerl/env.hpp"
#include "seerl/learner.hpp"
#include "seerl/schedule.hpp"
#include "seerl/selection.hpp"
#include "seerl/snapshot.hpp"

namespace seerl {

enum class RunMode { Seerl, B1Independent, B3RandomPerturb, ConstantLr };

inline RunMode mode_from_name(const std::string& name) {
  if (name == "seerl") return RunMode::Seerl;
  if (name == "b1-independent") return RunMode::B1Independent;
  if (name == "b3-random-perturb") return RunMode::B3RandomPerturb;
  if (name == "constant-lr") return RunMode::ConstantLr;
  throw ConfigError("unknown mode: " + name);
}

inline std::string mode_name(RunMode m) {
  switch (m) {
    case RunMode::Seerl: return "seerl";
    case RunMode::B1Independent: return "b1-independent";
    case RunMode::B3RandomPerturb: return "b3-random-perturb";
    case RunMode::ConstantLr: return "constant-lr";
  }
  return "?";
}

struct ExperimentConfig {
  std::string env_id = "gridworld";
  LearnerConfig learner;
  double alpha0 = 0.05;
  std::uint64_t total_steps = 100000; // T
  std::uint64_t num_cycles = 5;       // M
  SelectionConfig selection;          // subset_size is m
  Strategy strategy = Strategy::Majority;
  std::uint64_t episodes = 100; // E
  RunMode mode = RunMode::Seerl;
  double const_lr = -1.0;      // b3 / constant-lr rate; negative: alpha0 / 2
  double perturb_sigma = 1.0;  // b3 gradient-noise scale

  double constant_rate() const {
    return const_lr >= 0.0 ? const_lr : 0.5 * alpha0;
  }
};

// ---------------------------------------------------------------------------
// Config file: flat key=value lines, '#' comments.
// ---------------------------------------------------------------------------

inline void apply_config_key(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
  if (key == "env") cfg.env_id = value;
  else if (key == "hidden") cfg.learner.hidden = std::stoi(value);
  else if (key == "c_v") cfg.learner.c_v = std::stod(value);
  else if (key == "entropy_coef") cfg.learner.entropy_coef = std::stod(value);
  else if (key == "alpha0") cfg.alpha0 = std::stod(value);
  else if (key == "T") cfg.total_steps = std::stoull(value);
  else if (key == "M") cfg.num_cycles = std::stoull(value);
  else if (key == "m") cfg.selection.subset_size = std::stoull(value);
  else if (key == "beta") cfg.selection.beta = std::stod(value);
  else if (key == "t_err") cfg.selection.t_err = std::stod(value);
  else if (key == "epsilon") cfg.selection.epsilon = std::stod(value);
  else if (key == "sample_count") cfg.selection.sample_count = std::stoull(value);
  else if (key == "ridge") cfg.selection.ridge = std::stod(value);
  else if (key == "grid_cells") cfg.selection.grid_cells = std::stoi(value);
  else if (key == "strategy") cfg.strategy = strategy_from_name(value);
  else if (key == "episodes") cfg.episodes = std::stoull(value);
  else if (key == "mode") cfg.mode = mode_from_name(value);
  else if (key == "const_lr") cfg.const_lr = std::stod(value);
  else if (key == "perturb_sigma") cfg.perturb_sigma = std::stod(value);
  else if (key == "n_bins") cfg.selection.combiner.n_bins = std::stoi(value);
  else if (key == "parzen_h") cfg.selection.combiner.parzen_h = std::stod(value);
  else throw ConfigError("unknown config key: " + key);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open config: " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r'))
      line.pop_back();
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value, got: " + line);
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t");
      const auto last = s.find_last_not_of(" \t");
      if (first == std::string::npos) return std::string();
      return s.substr(first, last - first + 1);
    };
    apply_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (cfg.selection.subset_size > cfg.num_cycles)
    throw ConfigError("m must be <= M");
  return cfg;
}

// ---------------------------------------------------------------------------
// Training loops (cyclic snapshot run plus the baseline modes)
// ---------------------------------------------------------------------------

struct TrainResult {
  std::vector<PolicySnapshot> snapshots;
  TrainingLog log;
};

namespace detail {

/// Steps of one full run at which the mode takes its snapshots.
inline std::vector<std::uint64_t> snapshot_instants(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> instants;
  const ScheduleSpec spec{cfg.alpha0, cfg.total_steps, cfg.num_cycles};
  if (cfg.mode == RunMode::ConstantLr) {
    // Tail snapshots of a single annealed run: the low-diversity
    // reference for the cyclic schedule.
    const std::uint64_t spacing =
        std::max<std::uint64_t>(1, cfg.total_steps / (10 * cfg.num_cycles));
    for (std::uint64_t i = 1; i <= cfg.num_cycles; ++i)
      instants.push_back(cfg.total_steps - (cfg.num_cycles - i) * spacing);
  } else {
    for (std::uint64_t t = 1; t <= cfg.total_steps; ++t)
      if (snapshot_due(spec, t)) instants.push_back(t);
  }
  return instants;
}

struct SingleRun {
  PolicyParams final_params;
  std::vector<PolicySnapshot> snapshots;
};

/// One sequential training run of cfg.total_steps env steps. Appends one
/// log record per step; snapshots at `instants` (cycle_index starting at
/// cycle_base + 1). Everything is derived from `seed`.
inline SingleRun train_single_run(const ExperimentConfig& cfg,
                                  std::uint64_t seed, std::uint64_t cycle_base,
                                  std::uint64_t step_base,
                                  const std::vector<std::uint64_t>& instants,
                                  bool annealed_single_cycle, TrainingLog& log,
                                  const std::string& run_id) {
  auto env = make_env(cfg.env_id);
  const MdpSpec& mdp = env->spec();
  const Architecture arch = Architecture::for_env(mdp, cfg.learner.hidden);

  Rng root(seed);
  Rng init_rng = root.split(1);
  Rng action_rng = root.split(2);
  Rng episode_rng = root.split(3);
  Rng perturb_rng = root.split(4);

  PolicyParams params = PolicyParams::init(arch, init_rng);

  const std::uint64_t cycles =
      cfg.mode == RunMode::Seerl || cfg.mode == RunMode::B3RandomPerturb
          ? cfg.num_cycles
          : 1;
  const ScheduleSpec lr_spec{cfg.alpha0, cfg.total_steps,
                             annealed_single_cycle ? 1 : cycles};
  const std::uint64_t cycle_len =
      ScheduleSpec{cfg.alpha0, cfg.total_steps, cfg.num_cycles}.cycle_length();

  SingleRun out{params, {}};
  std::vector<double> state = env->reset(episode_rng.next_u64());
  std::size_t next_snap = 0;

  for (std::uint64_t t = 1; t <= cfg.total_steps; ++t) {
    double lr;
    switch (cfg.mode) {
      case RunMode::Seerl: lr = lr_at(lr_spec, t); break;
      case RunMode::B1Independent:
      case RunMode::ConstantLr: lr = lr_at(lr_spec, t); break;
      case RunMode::B3RandomPerturb: lr = cfg.constant_rate(); break;
      default: lr = lr_at(lr_spec, t); break;
    }

    const ActionDistribution dist = policy_distribution(params, state);
    const Action action = sample_action(dist, action_rng);
    const Transition tr = env->step(action);

    Sample sample{state, tr.action, tr.reward, tr.next_state, tr.done};
    TrainStepResult step_result =
        train_step(params, {sample}, lr, mdp.gamma, cfg.learner);
    params = std::move(step_result.params);

    LogRecord rec;
    rec.step = step_base + t;
    rec.cycle_index = cycle_base + std::min((t - 1) / cycle_len + 1, cfg.num_cycles);
    rec.state = state;
    rec.action = tr.action;
    rec.abs_total_error = std::abs(step_result.losses[0].total);
    log.records.push_back(std::move(rec));

    if (cfg.mode == RunMode::B3RandomPerturb && t % cycle_len == 0 &&
        t != cfg.total_steps)
      random_perturb(params.values, cfg.perturb_sigma, cfg.constant_rate(),
                     perturb_rng);

    if (next_snap < instants.size() && t == instants[next_snap]) {
      PolicySnapshot snap;
      snap.params = params;
      snap.meta.run_id = run_id;
      snap.meta.env_id = cfg.env_id;
      snap.meta.learner_config_hash = arch.hash();
      snap.meta.cycle_index = cycle_base + next_snap + 1;
      snap.meta.step = step_base + t;
      snap.meta.alpha0 = cfg.alpha0;
      snap.meta.total_steps = cfg.total_steps;
      snap.meta.num_cycles = cfg.num_cycles;
      out.snapshots.push_back(std::move(snap));
      ++next_snap;
    }

    state = tr.done ? env->reset(episode_rng.next_u64()) : tr.next_state;
  }
  out.final_params = std::move(params);
  return out;
}

} // namespace detail

/// Training phase. SEERL / B3 / constant-lr run once for T
/// steps and snapshot M times; B1 trains M independent full-length runs
/// and snapshots each final policy (so its log holds M*T records).
inline TrainResult run_training(const ExperimentConfig& cfg, std::uint64_t seed,
                                const std::string& run_id) {
  TrainResult result;
  result.log.env_id = cfg.env_id;

  if (cfg.mode == RunMode::B1Independent) {
    for (std::uint64_t i = 1; i <= cfg.num_cycles; ++i) {
      const std::vector<std::uint64_t> instants{cfg.total_steps};
      detail::SingleRun run = detail::train_single_run(
          cfg, seed * 1000003ull + i, i - 1, (i - 1) * cfg.total_steps,
          instants, /*annealed_single_cycle=*/true, result.log, run_id);
      // The snapshot machinery assigned cycle_base + 1 already.
      result.snapshots.push_back(std::move(run.snapshots.at(0)));
    }
    // B1 records carry the generating run's index as their cycle.
    for (auto& rec : result.log.records)
      rec.cycle_index = rec.step == 0 ? 1 : (rec.step - 1) / cfg.total_steps + 1;
    return result;
  }

  const std::vector<std::uint64_t> instants = detail::snapshot_instants(cfg);
  detail::SingleRun run = detail::train_single_run(
      cfg, seed, 0, 0, instants,
      /*annealed_single_cycle=*/cfg.mode == RunMode::ConstantLr, result.log,
      run_id);
  result.snapshots = std::move(run.snapshots);
  return result;
}

// ---------------------------------------------------------------------------
// Training-log persistence
// ---------------------------------------------------------------------------

inline void save_training_log(const TrainingLog& log, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoFailure("cannot open for writing: " + path);
  const bool discrete =
      log.records.empty() || log.records[0].action.is_discrete();
  os << "seerl-log v1 env=" << log.env_id
     << " action=" << (discrete ? "discrete" : "continuous")
     << " fields=step,cycle,state...,action...,abs_err\n";
  char buf[64];
  for (const auto& rec : log.records) {
    os << rec.step << ' ' << rec.cycle_index;
    for (double v : rec.state) {
      std::snprintf(buf, sizeof(buf), " %.6f", v);
      os << buf;
    }
    if (rec.action.is_discrete()) {
      os << ' ' << rec.action.index;
    } else {
      for (double v : rec.action.values) {
        std::snprintf(buf, sizeof(buf), " %.6f", v);
        os << buf;
      }
    }
    std::snprintf(buf, sizeof(buf), " %.17g", rec.abs_total_error);
    os << buf << '\n';
  }
  if (!os) throw IoFailure("write failed: " + path);
}

inline TrainingLog load_training_log(const std::string& path, int state_dim,
                                     int action_dim_if_continuous = 0) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open: " + path);
  std::string header;
  std::getline(is, header);
  if (header.rfind("seerl-log v1 ", 0) != 0)
    throw BadMagic("not a training log: " + path);
  TrainingLog log;
  {
    const auto pos = header.find("env=");
    const auto end = header.find(' ', pos);
    log.env_id = header.substr(pos + 4, end - pos - 4);
  }
  const bool discrete = header.find("action=discrete") != std::string::npos;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    LogRecord rec;
    ls >> rec.step >> rec.cycle_index;
    rec.state.resize(static_cast<std::size_t>(state_dim));
    for (double& v : rec.state) ls >> v;
    if (discrete) {
      ls >> rec.action.index;
    } else {
      rec.action.values.resize(static_cast<std::size_t>(action_dim_if_continuous));
      for (double& v : rec.action.values) ls >> v;
    }
    ls >> rec.abs_total_error;
    if (!ls) throw LengthMismatch("malformed log line: " + line);
    log.records.push_back(std::move(rec));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvaluationReport {
  std::vector<double> returns;            // undiscounted per episode
  std::vector<double> discounted_returns; // per episode
  double mean_return = 0.0;
  double std_return = 0.0;
  std::vector<double> per_policy_mean; // standalone mean return per policy
};

namespace detail {

inline double run_one_episode(Env& env, std::uint64_t episode_seed,
                              const std::vector<PolicyParams>& policies,
                              Strategy strategy, const CombinerConfig& combiner,
                              Rng& tie_rng, double gamma, double& discounted) {
  std::vector<double> state = env.reset(episode_seed);
  double total = 0.0, disc = 0.0, g = 1.0;
  while (true) {
    std::vector<Action> candidates(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i)
      candidates[i] = greedy_action(policy_distribution(policies[i], state));
    const Action a = combine_actions(strategy, candidates,
                                     env.spec().action_space, combiner, tie_rng);
    const Transition tr = env.step(a);
    total += tr.reward;
    disc += g * tr.reward;
    g *= gamma;
    if (tr.done) break;
    state = tr.next_state;
  }
  discounted = disc;
  return total;
}

} // namespace detail

/// E deterministic-policy episodes under the chosen combiner. Also
/// reports each policy's standalone mean return over the same episode
/// seeds.
inline EvaluationReport run_evaluation(const ExperimentConfig& cfg,
                                       const std::vector<PolicyParams>& policies,
                                       std::uint64_t seed) {
  if (policies.empty()) throw Error("run_evaluation: no policies");
  auto env = make_env(cfg.env_id);
  const double gamma = env->spec().gamma;

  Rng root(seed);
  Rng episode_rng = root.split(11);
  Rng tie_rng = root.split(12);

  std::vector<std::uint64_t> episode_seeds(cfg.episodes);
  for (auto& s : episode_seeds) s = episode_rng.next_u64();

  EvaluationReport report;
  for (std::uint64_t ep = 0; ep < cfg.episodes; ++ep) {
    double disc = 0.0;
    const double ret = detail::run_one_episode(
        *env, episode_seeds[ep], policies, cfg.strategy,
        cfg.selection.combiner, tie_rng, gamma, disc);
    report.returns.push_back(ret);
    report.discounted_returns.push_back(disc);
  }
  double sum = 0.0;
  for (double r : report.returns) sum += r;
  report.mean_return = sum / static_cast<double>(report.returns.size());
  double var = 0.0;
  for (double r : report.returns) {
    const double d = r - report.mean_return;
    var += d * d;
  }
  report.std_return =
      std::sqrt(var / static_cast<double>(report.returns.size()));

  for (const auto& policy : policies) {
    Rng solo_tie = root.split(13);
    double total = 0.0;
    for (std::uint64_t ep = 0; ep < cfg.episodes; ++ep) {
      double disc = 0.0;
      total += detail::run_one_episode(*env, episode_seeds[ep], {policy},
                                       cfg.strategy, cfg.selection.combiner,
                                       solo_tie, gamma, disc);
    }
    report.per_policy_mean.push_back(total /
                                     static_cast<double>(cfg.episodes));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

} // namespace detail

inline void save_selection_report(const SelectionReport& report,
                                  const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoFailure("cannot open for writing: " + path);
  os << "seerl-selection v1\n";
  os << "t_err=" << detail::fmt(report.problem.t_err_used, "%.9g") << "\n";
  os << "objective=" << detail::fmt(report.objective, "%.9g") << "\n";
  os << "w=";
  for (std::size_t i = 0; i < report.w.size(); ++i)
    os << (i ? "," : "") << detail::fmt(report.w[i], "%.9g");
  os << "\nchosen=";
  for (std::size_t i = 0; i < report.chosen.size(); ++i)
    os << (i ? "," : "") << report.chosen[i];
  os << "\ndiversity:\n";
  for (const auto& row : report.diversity) {
    for (std::size_t k = 0; k < row.size(); ++k)
      os << (k ? " " : "") << detail::fmt(row[k], "%.9g");
    os << "\n";
  }
  if (!os) throw IoFailure("write failed: " + path);
}

inline void save_episode_csv(const EvaluationReport& report,
                             const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoFailure("cannot open for writing: " + path);
  os << "episode,undiscounted_return,discounted_return\n";
  for (std::size_t ep = 0; ep < report.returns.size(); ++ep)
    os << ep << "," << detail::fmt(report.returns[ep]) << ","
       << detail::fmt(report.discounted_returns[ep]) << "\n";
  if (!os) throw IoFailure("write failed: " + path);
}

inline void save_summary(const ExperimentConfig& cfg, std::uint64_t seed,
                         const SelectionReport& sel,
                         const EvaluationReport& eval,
                         const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoFailure("cannot open for writing: " + path);
  os << "seerl-summary v1\n";
  os << "env=" << cfg.env_id << "\n";
  os << "mode=" << mode_name(cfg.mode) << "\n";
  os << "seed=" << seed << "\n";
  os << "T=" << cfg.total_steps << "\n";
  os << "M=" << cfg.num_cycles << "\n";
  os << "m=" << cfg.selection.subset_size << "\n";
  os << "alpha0=" << detail::fmt(cfg.alpha0, "%.9g") << "\n";
  os << "strategy=" << strategy_name(cfg.strategy) << "\n";
  os << "episodes=" << eval.returns.size() << "\n";
  os << "mean_return=" << detail::fmt(eval.mean_return) << "\n";
  os << "std_return=" << detail::fmt(eval.std_return) << "\n";
  os << "w=";
  for (std::size_t i = 0; i < sel.w.size(); ++i)
    os << (i ? "," : "") << detail::fmt(sel.w[i], "%.9g");
  os << "\nchosen=";
  for (std::size_t i = 0; i < sel.chosen.size(); ++i)
    os << (i ? "," : "") << sel.chosen[i];
  os << "\nper_policy_mean=";
  for (std::size_t i = 0; i < eval.per_policy_mean.size(); ++i)
    os << (i ? "," : "") << detail::fmt(eval.per_policy_mean[i]);
  os << "\ndiversity:\n";
  for (const auto& row : sel.diversity) {
    for (std::size_t k = 0; k < row.size(); ++k)
      os << (k ? " " : "") << detail::fmt(row[k], "%.9g");
    os << "\n";
  }
  if (!os) throw IoFailure("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Full pipeline and ablation sweeps
// ---------------------------------------------------------------------------

struct PipelineResult {
  TrainResult train;
  SelectionReport selection;
  EvaluationReport evaluation;
};

inline PipelineResult run_pipeline(ExperimentConfig cfg, std::uint64_t seed,
                                   const std::string& run_id) {
  cfg.selection.strategy = cfg.strategy;
  cfg.selection.seed = seed;

  PipelineResult result;
  result.train = run_training(cfg, seed, run_id);

  auto env = make_env(cfg.env_id);
  std::vector<PolicyParams> policies;
  policies.reserve(result.train.snapshots.size());
  for (const auto& snap : result.train.snapshots)
    policies.push_back(snap.params);

  result.selection =
      run_selection(policies, result.train.log, env->spec(), cfg.selection);

  std::vector<PolicyParams> chosen;
  for (std::size_t idx : result.selection.chosen)
    chosen.push_back(policies[idx]);
  result.evaluation = run_evaluation(cfg, chosen, seed);
  return result;
}

struct AblationRow {
  std::string sweep_key;
  std::string sweep_value;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double mean_return = 0.0;
  double std_return = 0.0;
  double mean_offdiag_kl = 0.0;
};

inline double mean_offdiagonal(const std::vector<std::vector<double>>& matrix) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < matrix.size(); ++i)
    for (std::size_t k = 0; k < matrix[i].size(); ++k) {
      if (i == k) continue;
      sum += matrix[i][k];
      ++count;
    }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

/// One full pipeline per (sweep value, seed); failures are recorded per
/// row and the sweep keeps going.
inline std::vector<AblationRow> run_ablation(const ExperimentConfig& base,
                                             const std::string& sweep_key,
                                             const std::vector<std::string>& values,
                                             const std::vector<std::uint64_t>& seeds) {
  std::vector<AblationRow> rows;
  for (const std::string& value : values) {
    for (std::uint64_t seed : seeds) {
      AblationRow row;
      row.sweep_key = sweep_key;
      row.sweep_value = value;
      row.seed = seed;
      try {
        ExperimentConfig cfg = base;
        apply_config_key(cfg, sweep_key, value);
        if (cfg.selection.subset_size > cfg.num_cycles)
          cfg.selection.subset_size = cfg.num_cycles;
        const PipelineResult r = run_pipeline(
            cfg, seed, sweep_key + value + "_s" + std::to_string(seed));
        row.ok = true;
        row.mean_return = r.evaluation.mean_return;
        row.std_return = r.evaluation.std_return;
        row.mean_offdiag_kl = mean_offdiagonal(r.selection.diversity);
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline void save_ablation_csv(const std::vector<AblationRow>& rows,
                              const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoFailure("cannot open for writing: " + path);
  os << "sweep_key,sweep_value,seed,ok,mean_return,std_return,mean_offdiag_kl,error\n";
  for (const auto& row : rows) {
    os << row.sweep_key << "," << row.sweep_value << "," << row.seed << ","
       << (row.ok ? 1 : 0) << "," << detail::fmt(row.mean_return) << ","
       << detail::fmt(row.std_return) << ","
       << detail::fmt(row.mean_offdiag_kl, "%.9g") << "," << row.error << "\n";
  }
  if (!os) throw IoFailure("write failed: " + path);
}

} // namespace seerl

#endif // SEERL_HARNESS_HPP
