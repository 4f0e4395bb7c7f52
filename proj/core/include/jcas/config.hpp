#pragma once

// Experiment configuration.
//
// On disk this is a JSON document whose sections follow the experiment table:
//   "environment" (grid, fleet, horizon, consensus, plus a nested "jcas" block
//   with the link-budget constants), "energy", "rewards", "marl" (PPO and
//   evaluation sizes), and "evaluation" (policy selection for eval/sweep).
// Every section and key is optional; omitted values keep the defaults below,
// so "{}" is the reference setup. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "jcas/env.hpp"
#include "jcas/ppo.hpp"

namespace jcas {

enum class PolicyKind { Random, ConstantPilot, AdaptivePilot, Checkpoint };

PolicyKind parse_policy_kind(std::string_view text);
const char* to_string(PolicyKind kind);

struct MarlParams {
  PpoHyper ppo;
  std::vector<int> hidden{64, 64, 64};
  std::int64_t training_steps = 250'000;
  int episodes_per_evaluation = 100;
  int num_envs = 8;
  int checkpoint_every = 10;
  double log_std_init = 0.0;

  // ceil(training_steps / batch_steps)
  int iterations() const;
};

struct ScriptedParams {
  double jitter = 0.1;
  double constant_pilot = 0.30;
  double adaptive_high_pilot = 0.30;
  double adaptive_low_pilot = 0.05;
  double adaptive_radius_cells = 3.0;
};

struct EvaluationParams {
  PolicyKind policy = PolicyKind::AdaptivePilot;
  std::string checkpoint;  // required when policy == Checkpoint
  std::uint64_t seed = 0;
  ScriptedParams scripted;
};

struct ExperimentConfig {
  EnvConfig env;
  MarlParams marl;
  EvaluationParams evaluation;

  void validate() const;
};

/// Throws ConfigError with the offending key path on malformed input.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full configuration (every key) as pretty-printed JSON.
std::string dump_config(const ExperimentConfig& config);

}  // namespace jcas
