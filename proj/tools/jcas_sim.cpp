// jcas_sim: evaluate, sweep and train from the command line.
//
//   jcas_sim eval  --policy adaptive-pilot --n-uavs 10 --episodes 100 --out metrics.csv
//   jcas_sim sweep --policy constant-pilot,adaptive-pilot --n-uavs 5,10,15 --out sweep.csv
//   jcas_sim train --iterations 40 --checkpoint-dir runs/a --log runs/a/iterations.csv

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jcas/config.hpp"
#include "jcas/errors.hpp"
#include "jcas/evaluation.hpp"
#include "jcas/training.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

struct EvalArgs {
  std::vector<std::string> policies;
  std::vector<int> n_uavs;
  std::vector<int> n_targets;
  std::optional<int> episodes;
  std::string out;
  std::string trace_dir;
  std::string checkpoint;
};

jcas::ExperimentConfig load(const CommonArgs& a) {
  if (a.config.empty()) return jcas::ExperimentConfig{};
  return jcas::load_config(a.config);
}

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "JSON experiment config (defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "Base seed (overrides evaluation.seed)");
  cmd->add_option("--workers", a.workers, "Worker threads")->check(CLI::PositiveNumber);
}

// eval takes single values; sweep takes comma lists. Both end up here.
int run_eval(const CommonArgs& common, const EvalArgs& args) {
  jcas::ExperimentConfig config = load(common);
  if (!args.checkpoint.empty()) config.evaluation.checkpoint = args.checkpoint;

  jcas::SweepSpec spec;
  if (args.policies.empty()) {
    spec.policies.push_back(config.evaluation.policy);
  } else {
    for (const std::string& p : args.policies) spec.policies.push_back(jcas::parse_policy_kind(p));
  }
  spec.n_uavs = args.n_uavs.empty() ? std::vector<int>{config.env.n_uavs} : args.n_uavs;
  spec.n_targets = args.n_targets.empty() ? std::vector<int>{config.env.n_targets} : args.n_targets;
  spec.episodes = args.episodes.value_or(config.marl.episodes_per_evaluation);
  spec.seed = common.seed.value_or(config.evaluation.seed);
  spec.workers = common.workers;
  if (!args.trace_dir.empty()) {
    std::filesystem::create_directories(args.trace_dir);
    spec.trace_dir = args.trace_dir;
  }

  const std::vector<jcas::SweepRow> rows = jcas::evaluate_sweep(config, spec);
  if (args.out.empty() || args.out == "-") {
    jcas::write_metrics_csv(std::cout, rows);
  } else {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw jcas::ConfigError("cannot open " + args.out);
    jcas::write_metrics_csv(out, rows);
  }
  return 0;
}

int run_train(const CommonArgs& common, std::optional<int> iterations, const std::string& checkpoint_dir,
              const std::string& log_path, const std::string& resume) {
  const jcas::ExperimentConfig config = load(common);
  jcas::TrainOptions options;
  options.iterations = iterations.value_or(config.marl.iterations());
  options.seed = common.seed.value_or(config.evaluation.seed);
  options.workers = common.workers;
  if (!checkpoint_dir.empty()) {
    std::filesystem::create_directories(checkpoint_dir);
    options.checkpoint_dir = checkpoint_dir;
  }
  if (!resume.empty()) options.resume_from = resume;

  std::string log = log_path;
  if (log.empty() && !checkpoint_dir.empty()) {
    log = (std::filesystem::path(checkpoint_dir) / "iterations.csv").string();
  }
  std::ofstream log_file;
  std::ostream* log_out = &std::cout;
  if (!log.empty()) {
    // A resumed run appends to the log it continues.
    const bool append = !resume.empty() && std::filesystem::exists(log);
    log_file.open(log, append ? std::ios::app : std::ios::trunc);
    if (!log_file) throw jcas::ConfigError("cannot open " + log);
    log_out = &log_file;
    if (!append) jcas::write_iteration_csv_header(log_file);
  } else {
    jcas::write_iteration_csv_header(std::cout);
  }

  jcas::train(config, options, [&](const jcas::IterationLog& row) {
    jcas::write_iteration_csv_row(*log_out, row);
    log_out->flush();
    if (log_out != &std::cout) {
      std::fprintf(stderr, "iter %d  return %.3f  kl %.4f  clip %.3f\n", row.iteration, row.mean_return,
                   row.approx_kl, row.clip_fraction);
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV joint communication and sensing mission simulator"};
  app.require_subcommand(1);

  auto* print_config = app.add_subcommand("config", "Print the full default (or merged) config");
  CommonArgs config_args;
  print_config->add_option("--config", config_args.config)->check(CLI::ExistingFile);

  CommonArgs eval_common;
  EvalArgs eval_args;
  std::string eval_policy;
  std::optional<int> eval_n, eval_t;
  auto* eval = app.add_subcommand("eval", "Monte Carlo evaluation of one policy");
  add_common(eval, eval_common);
  eval->add_option("--policy", eval_policy, "random|constant-pilot|adaptive-pilot|checkpoint");
  eval->add_option("--n-uavs", eval_n)->check(CLI::PositiveNumber);
  eval->add_option("--n-targets", eval_t)->check(CLI::NonNegativeNumber);
  eval->add_option("--episodes", eval_args.episodes)->check(CLI::PositiveNumber);
  eval->add_option("--out", eval_args.out, "Metrics CSV path (stdout when omitted)");
  eval->add_option("--trace-dir", eval_args.trace_dir, "Write one JSON-lines trace per episode");
  eval->add_option("--checkpoint", eval_args.checkpoint, "Weights for --policy checkpoint");

  CommonArgs sweep_common;
  EvalArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Cross product of policies, fleet sizes and hotspot counts");
  add_common(sweep, sweep_common);
  sweep->add_option("--policy,--policies", sweep_args.policies)->delimiter(',');
  sweep->add_option("--n-uavs", sweep_args.n_uavs)->delimiter(',')->check(CLI::PositiveNumber);
  sweep->add_option("--n-targets", sweep_args.n_targets)->delimiter(',')->check(CLI::NonNegativeNumber);
  sweep->add_option("--episodes", sweep_args.episodes)->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_args.out);
  sweep->add_option("--trace-dir", sweep_args.trace_dir);
  sweep->add_option("--checkpoint", sweep_args.checkpoint);

  CommonArgs train_common;
  std::optional<int> iterations;
  std::string checkpoint_dir, log_path, resume;
  auto* train = app.add_subcommand("train", "PPO training with a shared policy");
  add_common(train, train_common);
  train->add_option("--iterations", iterations, "Total iterations (default from marl.training_steps)")
      ->check(CLI::PositiveNumber);
  train->add_option("--checkpoint-dir", checkpoint_dir, "Directory for iter_NNNNNN.ckpt and latest.ckpt");
  train->add_option("--log", log_path, "Iteration CSV (default <checkpoint-dir>/iterations.csv)");
  train->add_option("--resume", resume, "Continue from this checkpoint")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*print_config) {
      std::cout << jcas::dump_config(load(config_args)) << '\n';
      return 0;
    }
    if (*eval) {
      if (!eval_policy.empty()) eval_args.policies = {eval_policy};
      if (eval_n) eval_args.n_uavs = {*eval_n};
      if (eval_t) eval_args.n_targets = {*eval_t};
      return run_eval(eval_common, eval_args);
    }
    if (*sweep) return run_eval(sweep_common, sweep_args);
    if (*train) return run_train(train_common, iterations, checkpoint_dir, log_path, resume);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "jcas_sim: %s\n", e.what());
    return 1;
  }
  return 0;
}
