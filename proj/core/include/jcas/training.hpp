#pragma once

// Synchronous PPO training with one policy shared by every agent.
//
// Each iteration collects config.marl.ppo.batch_steps environment steps from
// num_envs freshly seeded environments (every step yields one sample per
// agent), computes GAE per agent stream, and runs ppo_update. All randomness
// for iteration k derives from (seed, k), so a run resumed from a checkpoint
// reproduces the uninterrupted run exactly.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "jcas/checkpoint.hpp"
#include "jcas/config.hpp"
#include "jcas/ppo.hpp"

namespace jcas {

struct RolloutResult {
  RolloutBatch batch;
  std::vector<double> episode_returns;  // episodes that finished inside the window
  std::int64_t env_steps = 0;
};

/// Collects ceil(env_steps / num_envs) steps from each of num_envs
/// environments. A truncated episode's last reward is bootstrapped with
/// gamma * V(final observation) before being treated as terminal; a window
/// that ends mid-episode is bootstrapped with V of the current observation.
RolloutResult collect_rollouts(const EnvConfig& env, const PolicyWeights& weights,
                               const PpoHyper& hyper, std::uint64_t seed, int num_envs,
                               int env_steps, int workers);

struct IterationLog {
  int iteration = 0;  // 1-based
  std::int64_t env_steps = 0;
  int episodes = 0;
  double mean_return = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

struct TrainOptions {
  int iterations = 0;  // total, counting iterations already in a resumed checkpoint
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> checkpoint_dir;
  std::optional<std::filesystem::path> resume_from;
  int workers = 1;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<IterationLog> log;  // iterations run by this call
};

/// Checkpoints go to <checkpoint_dir>/iter_NNNNNN.ckpt every
/// marl.checkpoint_every iterations and to latest.ckpt after the last one.
/// A non-finite update aborts: the pre-update weights are written to
/// last_good.ckpt and the TrainingError propagates.
TrainResult train(const ExperimentConfig& config, const TrainOptions& options,
                  const std::function<void(const IterationLog&)>& on_iteration = {});

void write_iteration_csv_header(std::ostream& out);
void write_iteration_csv_row(std::ostream& out, const IterationLog& row);

}  // namespace jcas
