// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: train -> select -> evaluate, plus ablation sweeps
// and report printing. All outputs land in --out as plain text files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seerl/harness.hpp"

namespace fs = std::filesystem;
using namespace seerl;

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::string mode;
  std::string strategy;
  std::uint64_t m = 0;
  std::uint64_t M = 0;
  double alpha0 = -1.0;
  std::uint64_t T = 0;
  std::uint64_t episodes = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--seed", opts.seed, "run seed");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--mode", opts.mode,
                  "seerl | b1-independent | b3-random-perturb | constant-lr");
  cmd->add_option("--strategy", opts.strategy,
                  "majority | average | binning | dbs | ste");
  cmd->add_option("--m", opts.m, "ensemble subset size");
  cmd->add_option("--M", opts.M, "number of cycles / policies");
  cmd->add_option("--alpha0", opts.alpha0, "maximum learning rate");
  cmd->add_option("--T", opts.T, "total training steps");
  cmd->add_option("--episodes", opts.episodes, "evaluation episodes");
}

ExperimentConfig resolve_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (!opts.mode.empty()) cfg.mode = mode_from_name(opts.mode);
  if (!opts.strategy.empty()) cfg.strategy = strategy_from_name(opts.strategy);
  if (opts.m) cfg.selection.subset_size = opts.m;
  if (opts.M) cfg.num_cycles = opts.M;
  if (opts.alpha0 >= 0.0) cfg.alpha0 = opts.alpha0;
  if (opts.T) cfg.total_steps = opts.T;
  if (opts.episodes) cfg.episodes = opts.episodes;
  if (cfg.selection.subset_size > cfg.num_cycles)
    throw ConfigError("m must be <= M");
  return cfg;
}

std::string run_id_for(const ExperimentConfig& cfg, std::uint64_t seed) {
  return mode_name(cfg.mode) + "_" + cfg.env_id + "_s" + std::to_string(seed);
}

std::vector<PolicySnapshot> load_run_snapshots(const fs::path& dir,
                                               const std::string& run_id,
                                               std::uint64_t count) {
  std::vector<PolicySnapshot> snaps;
  for (std::uint64_t i = 1; i <= count; ++i)
    snaps.push_back(load_snapshot((dir / snapshot_filename(run_id, i)).string()));
  return snaps;
}

std::vector<std::size_t> load_chosen(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open: " + path.string());
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("chosen=", 0) != 0) continue;
    std::vector<std::size_t> chosen;
    std::istringstream ls(line.substr(7));
    std::string tok;
    while (std::getline(ls, tok, ',')) chosen.push_back(std::stoull(tok));
    return chosen;
  }
  throw LengthMismatch("no chosen= line in " + path.string());
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) out.push_back(tok);
  return out;
}

int do_train(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const std::string run_id = run_id_for(cfg, opts.seed);
  fs::create_directories(opts.out_dir);

  TrainResult result = run_training(cfg, opts.seed, run_id);
  for (const auto& snap : result.snapshots)
    save_snapshot(snap, (fs::path(opts.out_dir) /
                         snapshot_filename(run_id, snap.meta.cycle_index))
                            .string());
  save_training_log(result.log,
                    (fs::path(opts.out_dir) / (run_id + ".log")).string());
  std::cout << "trained run_id=" << run_id
            << " snapshots=" << result.snapshots.size()
            << " log_records=" << result.log.records.size() << "\n";
  return 0;
}

int do_select(const CommonOpts& opts) {
  ExperimentConfig cfg = resolve_config(opts);
  cfg.selection.strategy = cfg.strategy;
  cfg.selection.seed = opts.seed;
  const std::string run_id = run_id_for(cfg, opts.seed);
  const fs::path dir(opts.out_dir);

  auto env = make_env(cfg.env_id);
  const auto& space = env->spec().action_space;
  const int action_dim = std::holds_alternative<ContinuousSpace>(space)
                             ? std::get<ContinuousSpace>(space).dim
                             : 0;
  const TrainingLog log = load_training_log(
      (dir / (run_id + ".log")).string(), env->spec().state_dim, action_dim);

  std::vector<PolicySnapshot> snaps =
      load_run_snapshots(dir, run_id, cfg.num_cycles);
  std::vector<PolicyParams> policies;
  for (const auto& s : snaps) policies.push_back(s.params);

  const SelectionReport report =
      run_selection(policies, log, env->spec(), cfg.selection);
  save_selection_report(report,
                        (dir / (run_id + "_selection.txt")).string());
  std::cout << "selected run_id=" << run_id << " chosen=";
  for (std::size_t i = 0; i < report.chosen.size(); ++i)
    std::cout << (i ? "," : "") << report.chosen[i];
  std::cout << "\n";
  return 0;
}

int do_evaluate(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const std::string run_id = run_id_for(cfg, opts.seed);
  const fs::path dir(opts.out_dir);

  std::vector<PolicySnapshot> snaps =
      load_run_snapshots(dir, run_id, cfg.num_cycles);
  const std::vector<std::size_t> chosen =
      load_chosen(dir / (run_id + "_selection.txt"));
  std::vector<PolicyParams> policies;
  for (std::size_t idx : chosen) policies.push_back(snaps.at(idx).params);

  const EvaluationReport report = run_evaluation(cfg, policies, opts.seed);
  save_episode_csv(report, (dir / (run_id + "_episodes.csv")).string());
  std::cout << "evaluated run_id=" << run_id
            << " mean_return=" << report.mean_return
            << " std_return=" << report.std_return << "\n";
  return 0;
}

int do_ablate(const CommonOpts& opts, const std::string& sweep_key,
              const std::string& values_csv, const std::string& seeds_csv) {
  const ExperimentConfig cfg = resolve_config(opts);
  const std::vector<std::string> values = split_csv(values_csv);
  std::vector<std::uint64_t> seeds;
  for (const auto& s : split_csv(seeds_csv)) seeds.push_back(std::stoull(s));
  if (values.empty() || seeds.empty())
    throw ConfigError("ablate needs --values and --seeds");

  fs::create_directories(opts.out_dir);
  const std::vector<AblationRow> rows = run_ablation(cfg, sweep_key, values, seeds);
  const fs::path out = fs::path(opts.out_dir) / ("ablation_" + sweep_key + ".csv");
  save_ablation_csv(rows, out.string());
  std::cout << "ablation rows=" << rows.size() << " -> " << out.string() << "\n";
  return 0;
}

int do_report(const CommonOpts& opts) {
  const fs::path dir(opts.out_dir);
  bool found = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    const bool text = name.ends_with("_selection.txt") ||
                      name.ends_with(".csv") || name.ends_with("_summary.txt");
    if (!text) continue;
    found = true;
    std::cout << "==== " << name << " ====\n";
    std::ifstream is(entry.path());
    std::cout << is.rdbuf() << "\n";
  }
  if (!found) std::cout << "no reports under " << dir.string() << "\n";
  return 0;
}

int do_run(const CommonOpts& opts) {
  const ExperimentConfig cfg = resolve_config(opts);
  const std::string run_id = run_id_for(cfg, opts.seed);
  fs::create_directories(opts.out_dir);
  const fs::path dir(opts.out_dir);

  const PipelineResult result = run_pipeline(cfg, opts.seed, run_id);
  for (const auto& snap : result.train.snapshots)
    save_snapshot(snap, (dir / snapshot_filename(run_id, snap.meta.cycle_index))
                            .string());
  save_training_log(result.train.log, (dir / (run_id + ".log")).string());
  save_selection_report(result.selection,
                        (dir / (run_id + "_selection.txt")).string());
  save_episode_csv(result.evaluation,
                   (dir / (run_id + "_episodes.csv")).string());
  save_summary(cfg, opts.seed, result.selection, result.evaluation,
               (dir / (run_id + "_summary.txt")).string());
  std::cout << "run_id=" << run_id
            << " mean_return=" << result.evaluation.mean_return << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"snapshot-ensemble RL toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string sweep_key = "M", values_csv, seeds_csv = "0";

  auto* train = app.add_subcommand("train", "train and snapshot M policies");
  add_common(train, opts);
  auto* select = app.add_subcommand("select", "solve the policy-selection QP");
  add_common(select, opts);
  auto* evaluate = app.add_subcommand("evaluate", "evaluate the chosen ensemble");
  add_common(evaluate, opts);
  auto* run = app.add_subcommand("run", "full pipeline: train, select, evaluate");
  add_common(run, opts);
  auto* ablate = app.add_subcommand("ablate", "sweep a config key over values x seeds");
  add_common(ablate, opts);
  ablate->add_option("--sweep", sweep_key, "config key to sweep (e.g. M, alpha0, mode)");
  ablate->add_option("--values", values_csv, "comma-separated sweep values")->required();
  ablate->add_option("--seeds", seeds_csv, "comma-separated seeds");
  auto* report = app.add_subcommand("report", "print reports found under --out");
  add_common(report, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return do_train(opts);
    if (select->parsed()) return do_select(opts);
    if (evaluate->parsed()) return do_evaluate(opts);
    if (run->parsed()) return do_run(opts);
    if (ablate->parsed()) return do_ablate(opts, sweep_key, values_csv, seeds_csv);
    if (report->parsed()) return do_report(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
