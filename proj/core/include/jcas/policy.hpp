#pragma once

// Per-agent policies. All agents share one policy object; the environment
// observation is the only per-agent input.

#include <memory>
#include <span>
#include <string>

#include "jcas/env.hpp"
#include "jcas/mlp.hpp"
#include "jcas/rng.hpp"

namespace jcas {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual ActionVector act(std::span<const double> observation, Rng& rng) const = 0;
};

// Both components uniform on [-1, 1].
class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  ActionVector act(std::span<const double> observation, Rng& rng) const override;
};

enum class PilotMode { Constant, Adaptive };

struct SweepPolicyConfig {
  PilotMode mode = PilotMode::Adaptive;
  int width_cells = 12;
  int height_cells = 12;
  int n_targets = 0;
  int neighbor_slots = 4;
  double pilot_min = 0.01;
  double pilot_max = 0.30;
  double constant_pilot = 0.30;
  double adaptive_high_pilot = 0.30;
  double adaptive_low_pilot = 0.05;
  // Adaptive mode uses the high pilot while an unconfirmed or unknown hotspot
  // lies within this many cells (Euclidean).
  double adaptive_radius_cells = 3.0;
  // Probability of replacing the sweep move with a uniformly random one; this
  // is what separates UAVs that start stacked on the same depot.
  double jitter = 0.0;
};

/// Boustrophedon coverage computed from the agent's own normalised position.
///
/// Cells with x >= 1 are swept in a snake (even rows rightward, odd rows
/// leftward, stepping down at the row ends) and column 0 is the return lane
/// back to the top. On grids with an even number of rows this is a
/// Hamiltonian cycle, so a lone UAV revisits nothing until it has seen every
/// cell.
class SweepPolicy final : public Policy {
 public:
  explicit SweepPolicy(SweepPolicyConfig config);

  std::string name() const override;
  ActionVector act(std::span<const double> observation, Rng& rng) const override;

  Direction sweep_direction(Cell cell) const;
  double pilot_for(std::span<const double> observation) const;
  const SweepPolicyConfig& config() const { return config_; }

 private:
  SweepPolicyConfig config_;
  ObservationLayout layout_;
};

// Shared Gaussian MLP. Stochastic mode samples and clips; deterministic mode
// returns the clipped mean.
class MlpPolicy final : public Policy {
 public:
  MlpPolicy(PolicyWeights weights, bool deterministic);

  std::string name() const override { return "checkpoint"; }
  ActionVector act(std::span<const double> observation, Rng& rng) const override;
  const PolicyWeights& weights() const { return weights_; }

 private:
  PolicyWeights weights_;
  bool deterministic_;
};

SweepPolicyConfig sweep_config_for(const EnvConfig& env, PilotMode mode, double jitter);

}  // namespace jcas
