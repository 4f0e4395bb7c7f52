#pragma once

// Monte Carlo evaluation: single episodes, per-cell aggregation and
// (policy x fleet size x hotspot count) sweeps.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jcas/config.hpp"
#include "jcas/env.hpp"
#include "jcas/policy.hpp"
#include "jcas/trace.hpp"

namespace jcas {

struct EpisodeMetrics {
  bool success = false;                 // every hotspot informed
  int mission_time = 0;                 // completion step, or t_max when not completed
  double total_energy_kwh = 0.0;
  double total_co2_kg = 0.0;
  double mean_norm_throughput = 0.0;    // per-step fleet mean, averaged over the episode
  double episode_return = 0.0;
  std::vector<int> detection_times;     // per hotspot, -1 if never detected

  bool operator==(const EpisodeMetrics&) const = default;
};

std::uint64_t episode_seed(std::uint64_t base_seed, int episode_index);

/// Runs one episode to completion or truncation. Policy sampling uses its own
/// stream derived from episode_seed, separate from the environment's.
EpisodeMetrics run_episode(const EnvConfig& config, const Policy& policy, std::uint64_t episode_seed,
                           TraceWriter* trace = nullptr, int episode_index = 0);

/// Episodes 0..episodes-1 with seeds episode_seed(base_seed, i), spread over
/// `workers` threads. Results are returned in episode order, so the worker
/// count never changes them. When trace_dir is set each episode writes
/// <trace_dir>/<trace_prefix>ep<index>.jsonl.
std::vector<EpisodeMetrics> run_episodes(const EnvConfig& config, const Policy& policy,
                                         std::uint64_t base_seed, int episodes, int workers,
                                         const std::optional<std::filesystem::path>& trace_dir = {},
                                         const std::string& trace_prefix = {});

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
};

MetricSummary summarize(std::span<const double> values);

struct SweepRow {
  std::string policy;
  int n_uavs = 0;
  int n_targets = 0;
  int episodes = 0;
  MetricSummary success;
  MetricSummary mission_time;
  MetricSummary energy_kwh;
  MetricSummary co2_kg;
  MetricSummary throughput;
  MetricSummary episode_return;
};

SweepRow aggregate(const std::string& policy, int n_uavs, int n_targets,
                   std::span<const EpisodeMetrics> episodes);

/// Builds the policy selected by `kind` for `env`. Checkpoint policies load
/// config.evaluation.checkpoint and run deterministically (mean action).
std::unique_ptr<Policy> make_policy(PolicyKind kind, const ExperimentConfig& config,
                                    const EnvConfig& env);

struct SweepSpec {
  std::vector<PolicyKind> policies;
  std::vector<int> n_uavs;
  std::vector<int> n_targets;
  int episodes = 100;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<std::filesystem::path> trace_dir;
};

/// One row per (policy, n_uavs, n_targets), in that nesting order. Every cell
/// reuses the same episode seeds.
std::vector<SweepRow> evaluate_sweep(const ExperimentConfig& base, const SweepSpec& spec);

inline constexpr std::array<const char*, 10> kMetricsCsvColumns{
    "policy",          "n_uavs",          "n_targets",   "episodes",
    "success_rate",    "success_se",      "mean_mission_time",
    "mean_energy_kwh", "mean_co2_kg",     "mean_norm_throughput"};

void write_metrics_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace jcas
