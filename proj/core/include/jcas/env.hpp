#pragma once

// Multi-UAV hotspot search as a decentralised POMDP with a shared team reward.
//
// One call to Environment::step runs, in order:
//   1. decode actions            6. build the communication graph
//   2. return-to-base overrides  7. OR-propagate knowledge
//   3. simultaneous moves        8. informed / completion bookkeeping
//   4. energy, charging, CO2     9. reward ledger
//   5. detection round          10. observations
// Detection and the graph both see post-move positions.

#include <cstdint>
#include <span>
#include <vector>

#include "jcas/energy_carbon.hpp"
#include "jcas/knowledge_net.hpp"
#include "jcas/phy_jcas.hpp"
#include "jcas/rng.hpp"
#include "jcas/world.hpp"

namespace jcas {

using Observation = std::vector<double>;

struct ActionVector {
  double u_dir = 0.0;
  double u_pilot = 0.0;
};

struct DecodedAction {
  Direction direction = Direction::Stay;
  double pilot_density = 0.0;
  bool operator==(const DecodedAction&) const = default;
};

/// Clips both components to [-1, 1]. u_dir falls into five equal bins
/// (up, down, left, right, stay from -1 upward); u_pilot maps affinely onto
/// [pilot_min, pilot_max]. Throws ProtocolError on NaN.
DecodedAction decode_action(ActionVector action, const JcasParams& params);

// Inverses used by scripted policies: the centre of a direction's bin, and the
// u_pilot that decodes to `pilot_density`.
double direction_to_action(Direction direction);
double pilot_to_action(double pilot_density, const JcasParams& params);

struct RewardWeights {
  double detection = 7.0;
  double inform = 4.0;
  double completion = 10.0;
  double coverage = 0.5;
  double energy = 0.2;
  double carbon = 0.1;
  double revisit = 0.01;
  double truncation = 0.4;
  double throughput = 0.5;
  double spread = 0.1;
  // Potential-based distance shaping and direct carbon-aware charging penalty.
  double shaping_distance = 0.1;
  double shaping_carbon = 0.05;

  void validate() const;
};

struct RewardInputs {
  int newly_detected = 0;
  int newly_informed = 0;
  bool completed = false;
  int new_cells = 0;
  int cell_count = 1;
  double total_energy_kwh = 0.0;
  double total_co2_kg = 0.0;
  int charging_agents = 0;
  double carbon_intensity = 0.0;
  int revisit_count = 0;
  bool truncated = false;
  double mean_throughput = 0.0;
  double knowledge_spread = 0.0;
  double potential_before = 0.0;
  double potential_after = 0.0;
};

// Signed contributions to the team reward; total() is their sum.
struct RewardTerms {
  double detection = 0.0;
  double inform = 0.0;
  double completion = 0.0;
  double coverage = 0.0;
  double energy = 0.0;
  double carbon = 0.0;
  double carbon_shaping = 0.0;
  double revisit = 0.0;
  double truncation = 0.0;
  double throughput = 0.0;
  double spread = 0.0;
  double potential = 0.0;

  double total() const;
  bool operator==(const RewardTerms&) const = default;
};

RewardTerms compute_reward(const RewardInputs& in, const RewardWeights& weights);

/// Phi(s) = -shaping_distance * mean over UAVs of the Manhattan distance to the
/// nearest undetected hotspot, divided by (W + H). Zero once all are detected.
double distance_potential(const WorldState& world, const RewardWeights& weights);

struct EnvConfig {
  GridSpec grid;
  int n_uavs = 5;
  int n_targets = 3;
  int t_max = 100;
  int theta_detect = 3;
  JcasParams phy;
  EnergyParams energy;
  RewardWeights rewards;
  DetectionMode detection_mode = DetectionMode::Stochastic;
  // When false, inert UAVs are not required to know a hotspot for it to count
  // as informed.
  bool inert_agents_block_inform = true;
  int neighbor_slots = 4;

  void validate() const;
  int observation_dim() const;
};

// Index map of the flat per-agent observation vector.
struct ObservationLayout {
  int n_targets = 0;
  int neighbor_slots = 4;

  static constexpr int kPosition = 0;    // x/(W-1), y/(H-1)
  static constexpr int kBattery = 2;     // b / b_max
  static constexpr int kPilot = 3;       // (rho - rho_min) / (rho_max - rho_min)
  static constexpr int kThroughput = 4;  // mean normalised throughput to neighbours
  static constexpr int kHotspots = 5;    // 4 per hotspot: dx/W, dy/H, detected, known

  int hotspot(int j) const { return kHotspots + 4 * j; }
  int neighbors() const { return kHotspots + 4 * n_targets; }  // 2 per slot: dx/W, dy/H
  int neighbor_count() const { return neighbors() + 2 * neighbor_slots; }
  int carbon() const { return neighbor_count() + 1; }
  int depot_distance() const { return carbon() + 1; }
  int fraction_detected() const { return depot_distance() + 1; }
  int fraction_informed() const { return fraction_detected() + 1; }
  int time() const { return fraction_informed() + 1; }
  int dim() const { return time() + 1; }
};

struct Transition {
  int t = 0;  // time index after the step
  std::vector<DecodedAction> decoded;
  std::vector<Direction> applied;  // after return-to-base / inert overrides
  std::vector<Cell> positions;
  std::vector<double> battery_kwh;
  std::vector<double> energy_kwh;
  std::vector<double> charged_kwh;
  std::vector<double> throughput;  // best-link normalised throughput per agent
  std::vector<std::uint8_t> returning;
  std::vector<std::uint8_t> inert;
  std::vector<int> detection_votes;  // per hotspot, local detections this step
  std::vector<int> newly_detected;   // hotspot indices
  std::vector<int> newly_informed;
  double carbon_intensity = 0.0;
  double grid_energy_kwh = 0.0;
  double co2_kg = 0.0;
  int new_cells = 0;
  int revisit_count = 0;
  double knowledge_spread = 0.0;
  double potential_before = 0.0;
  double potential_after = 0.0;
  RewardTerms terms;
  double team_reward = 0.0;
  bool done = false;
  bool truncated = false;
};

struct StepResult {
  std::vector<Observation> observations;
  double reward = 0.0;
  bool done = false;
  bool truncated = false;
  Transition transition;
};

Observation build_observation(int agent, const WorldState& world, const CommGraph& graph,
                              const KnowledgeMatrix& knowledge, const EnvConfig& config,
                              double carbon_intensity);

class Environment {
 public:
  explicit Environment(EnvConfig config);

  /// Starts a new episode. Spawning and the in-episode stream are both derived
  /// from `seed`. With zero hotspots the episode is complete immediately.
  std::vector<Observation> reset(std::uint64_t seed);
  /// Starts from a prepared world instead of a spawned one; `seed` drives the
  /// in-episode stream. Throws ConfigError if the world does not fit the config.
  std::vector<Observation> reset(WorldState world, std::uint64_t seed);

  /// Throws ProtocolError when called before reset, after the episode ended,
  /// or with the wrong number of actions.
  StepResult step(std::span<const ActionVector> actions);

  const EnvConfig& config() const { return config_; }
  const WorldState& world() const { return world_; }
  const KnowledgeMatrix& knowledge() const { return knowledge_; }
  const CommGraph& graph() const { return graph_; }
  double carbon_intensity() const { return carbon_intensity_; }
  double potential() const { return potential_; }
  bool done() const { return done_; }
  bool truncated() const { return truncated_; }
  bool finished() const { return done_ || truncated_; }
  int observation_dim() const { return config_.observation_dim(); }

  std::vector<Observation> observations() const;

 private:
  EnvConfig config_;
  WorldState world_;
  KnowledgeMatrix knowledge_;
  CommGraph graph_;
  Rng rng_;
  double carbon_intensity_ = 0.0;
  double potential_ = 0.0;
  bool started_ = false;
  bool done_ = false;
  bool truncated_ = false;
};

}  // namespace jcas
