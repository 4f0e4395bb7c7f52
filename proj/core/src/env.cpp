#include "jcas/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jcas/errors.hpp"

namespace jcas {

DecodedAction decode_action(ActionVector action, const JcasParams& params) {
  if (std::isnan(action.u_dir) || std::isnan(action.u_pilot)) {
    throw ProtocolError("decode_action: NaN action component");
  }
  const double u_dir = std::clamp(action.u_dir, -1.0, 1.0);
  const double u_pilot = std::clamp(action.u_pilot, -1.0, 1.0);

  Direction dir = Direction::Stay;
  if (u_dir < -0.6) {
    dir = Direction::Up;
  } else if (u_dir < -0.2) {
    dir = Direction::Down;
  } else if (u_dir < 0.2) {
    dir = Direction::Left;
  } else if (u_dir < 0.6) {
    dir = Direction::Right;
  }

  // std::lerp is exact at both ends, so u_pilot = +-1 hits the bounds bit-for-bit.
  const double pilot = std::clamp(std::lerp(params.pilot_min, params.pilot_max, (u_pilot + 1.0) / 2.0),
                                  params.pilot_min, params.pilot_max);
  return {dir, pilot};
}

double direction_to_action(Direction direction) {
  switch (direction) {
    case Direction::Up: return -0.8;
    case Direction::Down: return -0.4;
    case Direction::Left: return 0.0;
    case Direction::Right: return 0.4;
    case Direction::Stay: return 0.8;
  }
  return 0.8;
}

double pilot_to_action(double pilot_density, const JcasParams& params) {
  const double u = 2.0 * (pilot_density - params.pilot_min) / (params.pilot_max - params.pilot_min) - 1.0;
  return std::clamp(u, -1.0, 1.0);
}

void RewardWeights::validate() const {
  for (double w : {detection, inform, completion, coverage, energy, carbon, revisit, truncation,
                   throughput, spread, shaping_distance, shaping_carbon}) {
    if (!(w >= 0.0)) throw ConfigError("RewardWeights: magnitudes must be finite and >= 0");
  }
}

double RewardTerms::total() const {
  return detection + inform + completion + coverage + energy + carbon + carbon_shaping + revisit +
         truncation + throughput + spread + potential;
}

RewardTerms compute_reward(const RewardInputs& in, const RewardWeights& w) {
  RewardTerms r;
  r.detection = w.detection * in.newly_detected;
  r.inform = w.inform * in.newly_informed;
  r.completion = in.completed ? w.completion : 0.0;
  r.coverage = w.coverage * static_cast<double>(in.new_cells) / static_cast<double>(in.cell_count);
  r.energy = -w.energy * in.total_energy_kwh;
  r.carbon = -w.carbon * in.total_co2_kg;
  r.carbon_shaping = -w.shaping_carbon * in.carbon_intensity * in.charging_agents;
  r.revisit = -w.revisit * in.revisit_count;
  r.truncation = in.truncated ? -w.truncation : 0.0;
  r.throughput = w.throughput * in.mean_throughput;
  r.spread = w.spread * in.knowledge_spread;
  r.potential = in.potential_after - in.potential_before;
  return r;
}

double distance_potential(const WorldState& world, const RewardWeights& weights) {
  if (world.uavs.empty()) return 0.0;
  const double norm = static_cast<double>(world.grid.width_cells + world.grid.height_cells);
  double sum = 0.0;
  for (const UavState& u : world.uavs) {
    int best = -1;
    for (const Hotspot& h : world.hotspots) {
      if (h.detected()) continue;
      const int d = manhattan_distance(u.cell, h.cell);
      if (best < 0 || d < best) best = d;
    }
    if (best > 0) sum += best / norm;
  }
  return -weights.shaping_distance * sum / static_cast<double>(world.uavs.size());
}

void EnvConfig::validate() const {
  grid.validate();
  phy.validate();
  energy.validate();
  rewards.validate();
  if (n_uavs < 1) throw ConfigError("EnvConfig: n_uavs must be >= 1");
  if (n_targets < 0) throw ConfigError("EnvConfig: n_targets must be >= 0");
  const int free_cells =
      grid.cell_count() - static_cast<int>(std::count_if(
                              grid.depot_cells.begin(), grid.depot_cells.end(),
                              [&](Cell c) { return grid.contains(c); }));
  if (n_targets > free_cells) {
    throw ConfigError("EnvConfig: n_targets " + std::to_string(n_targets) + " exceeds " +
                      std::to_string(free_cells) + " non-depot cells");
  }
  if (t_max < 1) throw ConfigError("EnvConfig: t_max must be >= 1");
  if (theta_detect < 1) throw ConfigError("EnvConfig: theta_detect must be >= 1");
  if (neighbor_slots < 0) throw ConfigError("EnvConfig: neighbor_slots must be >= 0");
}

int EnvConfig::observation_dim() const {
  return ObservationLayout{n_targets, neighbor_slots}.dim();
}

Observation build_observation(int agent, const WorldState& world, const CommGraph& graph,
                              const KnowledgeMatrix& knowledge, const EnvConfig& config,
                              double carbon_intensity) {
  const ObservationLayout layout{static_cast<int>(world.hotspots.size()), config.neighbor_slots};
  Observation obs(static_cast<std::size_t>(layout.dim()), 0.0);
  auto at = [&](int i) -> double& { return obs[static_cast<std::size_t>(i)]; };

  const GridSpec& g = world.grid;
  const double w = g.width_cells;
  const double h = g.height_cells;
  const UavState& self = world.uavs[static_cast<std::size_t>(agent)];
  const JcasParams& phy = config.phy;
  const int n = static_cast<int>(world.uavs.size());
  const int m = static_cast<int>(world.hotspots.size());

  at(ObservationLayout::kPosition) = g.width_cells > 1 ? self.cell.x / (w - 1.0) : 0.0;
  at(ObservationLayout::kPosition + 1) = g.height_cells > 1 ? self.cell.y / (h - 1.0) : 0.0;
  at(ObservationLayout::kBattery) = self.battery_kwh / config.energy.b_max_kwh;
  at(ObservationLayout::kPilot) =
      (self.pilot_density - phy.pilot_min) / (phy.pilot_max - phy.pilot_min);

  const std::vector<int> nbrs = graph.neighbors(agent);
  if (!nbrs.empty()) {
    double sum = 0.0;
    for (int j : nbrs) {
      sum += normalized_throughput(graph.snr_db(agent, j), 1.0 - self.pilot_density, phy);
    }
    at(ObservationLayout::kThroughput) = sum / static_cast<double>(nbrs.size());
  }

  int n_detected = 0;
  int n_informed = 0;
  for (int j = 0; j < m; ++j) {
    const Hotspot& hs = world.hotspots[static_cast<std::size_t>(j)];
    const int base = layout.hotspot(j);
    at(base) = (hs.cell.x - self.cell.x) / w;
    at(base + 1) = (hs.cell.y - self.cell.y) / h;
    at(base + 2) = hs.detected() ? 1.0 : 0.0;
    at(base + 3) = knowledge.get(agent, j) ? 1.0 : 0.0;
    n_detected += hs.detected() ? 1 : 0;
    n_informed += hs.informed() ? 1 : 0;
  }

  // Nearest neighbours first; ties broken by index.
  std::vector<int> sorted = nbrs;
  std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) {
    return cell_distance_m(self.cell, world.uavs[static_cast<std::size_t>(a)].cell, 1.0) <
           cell_distance_m(self.cell, world.uavs[static_cast<std::size_t>(b)].cell, 1.0);
  });
  const int slots = std::min<int>(config.neighbor_slots, static_cast<int>(sorted.size()));
  for (int k = 0; k < slots; ++k) {
    const Cell other = world.uavs[static_cast<std::size_t>(sorted[static_cast<std::size_t>(k)])].cell;
    at(layout.neighbors() + 2 * k) = (other.x - self.cell.x) / w;
    at(layout.neighbors() + 2 * k + 1) = (other.y - self.cell.y) / h;
  }
  at(layout.neighbor_count()) = n > 1 ? static_cast<double>(nbrs.size()) / (n - 1) : 0.0;

  const double ci_span = config.energy.carbon_intensity_max - config.energy.carbon_intensity_min;
  at(layout.carbon()) =
      ci_span > 0.0 ? (carbon_intensity - config.energy.carbon_intensity_min) / ci_span : 0.0;
  at(layout.depot_distance()) =
      manhattan_distance(self.cell, nearest_depot(self.cell, g)) / (w + h);
  at(layout.fraction_detected()) = m > 0 ? static_cast<double>(n_detected) / m : 1.0;
  at(layout.fraction_informed()) = m > 0 ? static_cast<double>(n_informed) / m : 1.0;
  at(layout.time()) = static_cast<double>(world.t) / config.t_max;
  return obs;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

std::vector<Observation> Environment::reset(std::uint64_t seed) {
  return reset(spawn_mission(seed, config_.grid, config_.n_uavs, config_.n_targets,
                             config_.energy.b_max_kwh, config_.phy.pilot_min),
               seed);
}

std::vector<Observation> Environment::reset(WorldState world, std::uint64_t seed) {
  if (!(world.grid == config_.grid) || static_cast<int>(world.uavs.size()) != config_.n_uavs ||
      static_cast<int>(world.hotspots.size()) != config_.n_targets ||
      world.visited.size() != static_cast<std::size_t>(config_.grid.cell_count())) {
    throw ConfigError("Environment::reset: world does not match the environment config");
  }
  for (const UavState& u : world.uavs) {
    if (!config_.grid.contains(u.cell)) throw ConfigError("Environment::reset: UAV outside the grid");
  }
  for (const Hotspot& h : world.hotspots) {
    if (!config_.grid.contains(h.cell)) throw ConfigError("Environment::reset: hotspot outside the grid");
  }
  world_ = std::move(world);
  rng_ = Rng(derive_seed(seed, 1));
  knowledge_ = KnowledgeMatrix(config_.n_uavs, config_.n_targets);
  carbon_intensity_ = sample_carbon_intensity(rng_, config_.energy);
  graph_ = build_comm_graph(world_.uavs, world_.grid, config_.phy);
  potential_ = distance_potential(world_, config_.rewards);
  started_ = true;
  done_ = config_.n_targets == 0;
  truncated_ = false;
  return observations();
}

std::vector<Observation> Environment::observations() const {
  std::vector<Observation> out;
  out.reserve(world_.uavs.size());
  for (int i = 0; i < config_.n_uavs; ++i) {
    out.push_back(build_observation(i, world_, graph_, knowledge_, config_, carbon_intensity_));
  }
  return out;
}

StepResult Environment::step(std::span<const ActionVector> actions) {
  if (!started_) throw ProtocolError("Environment::step called before reset");
  if (done_ || truncated_) throw ProtocolError("Environment::step called after episode end");
  const int n = config_.n_uavs;
  const int m = config_.n_targets;
  if (static_cast<int>(actions.size()) != n) {
    throw ProtocolError("Environment::step expects " + std::to_string(n) + " actions, got " +
                        std::to_string(actions.size()));
  }
  const auto un = static_cast<std::size_t>(n);
  const EnergyParams& ep = config_.energy;
  const GridSpec& grid = world_.grid;

  Transition tr;
  tr.t = world_.t + 1;
  tr.potential_before = potential_;

  // (1) decode
  tr.decoded.reserve(un);
  for (const ActionVector& a : actions) tr.decoded.push_back(decode_action(a, config_.phy));

  // (2) return-to-base / inert overrides and (3) simultaneous moves
  tr.applied.resize(un, Direction::Stay);
  std::vector<std::uint8_t> moved(un, 0);
  for (std::size_t i = 0; i < un; ++i) {
    UavState& u = world_.uavs[i];
    if (u.inert) continue;
    u.pilot_density = tr.decoded[i].pilot_density;
    Direction dir = tr.decoded[i].direction;
    const bool at_depot = grid.is_depot(u.cell);
    if (!u.returning_to_base && u.battery_kwh < ep.rtb_threshold_kwh) u.returning_to_base = true;
    if (u.returning_to_base && at_depot && u.battery_kwh >= ep.rtb_resume_fraction * ep.b_max_kwh) {
      u.returning_to_base = false;
    }
    if (u.returning_to_base) dir = step_toward(u.cell, nearest_depot(u.cell, grid));
    tr.applied[i] = dir;
  }
  std::vector<Cell> previous(un);
  for (std::size_t i = 0; i < un; ++i) {
    UavState& u = world_.uavs[i];
    previous[i] = u.cell;
    u.cell = apply_move(u.cell, tr.applied[i], grid);
    moved[i] = u.cell != previous[i] ? 1 : 0;
  }

  // (4) energy, charging, carbon
  carbon_intensity_ = sample_carbon_intensity(rng_, ep);
  tr.carbon_intensity = carbon_intensity_;
  tr.energy_kwh.assign(un, 0.0);
  tr.charged_kwh.assign(un, 0.0);
  int charging = 0;
  double total_energy = 0.0;
  for (std::size_t i = 0; i < un; ++i) {
    UavState& u = world_.uavs[i];
    if (u.inert) continue;
    const double e = step_energy_kwh(moved[i] != 0, u.pilot_density, config_.phy.pilot_max, ep);
    const bool at_depot = grid.is_depot(u.cell);
    const double before = u.battery_kwh;
    u.battery_kwh = update_battery(before, e, at_depot, ep);
    if (at_depot) {
      tr.charged_kwh[i] = std::max(0.0, u.battery_kwh - (before - e));
      const CarbonSplit split = carbon_emission_kg(tr.charged_kwh[i], carbon_intensity_, ep);
      tr.grid_energy_kwh += split.grid_kwh;
      tr.co2_kg += split.co2_kg;
      if (tr.charged_kwh[i] > 0.0) ++charging;
    } else if (u.battery_kwh <= 0.0) {
      u.inert = true;
    }
    tr.energy_kwh[i] = e;
    total_energy += e;
  }

  // Coverage bookkeeping on post-move cells.
  std::vector<std::uint8_t> fresh(world_.visited.size(), 0);
  for (std::size_t i = 0; i < un; ++i) {
    const auto c = static_cast<std::size_t>(grid.index_of(world_.uavs[i].cell));
    if (!world_.visited[c]) {
      if (!fresh[c]) ++tr.new_cells;
      fresh[c] = 1;
    } else if (moved[i]) {
      ++tr.revisit_count;
    }
  }
  for (std::size_t c = 0; c < fresh.size(); ++c) world_.visited[c] |= fresh[c];

  world_.t = tr.t;

  // (5) detection
  const DetectionRound round =
      detection_round(world_, config_.phy, config_.theta_detect, config_.detection_mode, rng_);
  tr.detection_votes.assign(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < m; ++j) {
    tr.detection_votes[static_cast<std::size_t>(j)] = round.local.count_column(j);
    for (int i = 0; i < n; ++i) {
      if (round.local.get(i, j)) knowledge_.set(i, j);
    }
    if (round.newly_detected[static_cast<std::size_t>(j)]) {
      world_.hotspots[static_cast<std::size_t>(j)].detected_at = tr.t;
      tr.newly_detected.push_back(j);
    }
  }

  // (6) graph and (7) propagation
  graph_ = build_comm_graph(world_.uavs, grid, config_.phy);
  knowledge_ = propagate(std::move(knowledge_), graph_);

  // (8) informed / completion
  std::vector<std::uint8_t> detected(static_cast<std::size_t>(m), 0);
  for (int j = 0; j < m; ++j) {
    detected[static_cast<std::size_t>(j)] = world_.hotspots[static_cast<std::size_t>(j)].detected();
  }
  std::vector<std::uint8_t> counted(un, 1);
  if (!config_.inert_agents_block_inform) {
    for (std::size_t i = 0; i < un; ++i) counted[i] = world_.uavs[i].inert ? 0 : 1;
  }
  const std::vector<std::uint8_t> informed = informed_status(knowledge_, detected, counted);
  int n_informed = 0;
  for (int j = 0; j < m; ++j) {
    Hotspot& hs = world_.hotspots[static_cast<std::size_t>(j)];
    if (informed[static_cast<std::size_t>(j)] && !hs.informed()) {
      hs.informed_at = tr.t;
      tr.newly_informed.push_back(j);
    }
    n_informed += hs.informed() ? 1 : 0;
  }
  done_ = n_informed == m;
  truncated_ = !done_ && tr.t >= config_.t_max;

  // (9) reward
  tr.throughput.assign(un, 0.0);
  double throughput_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int j = 0; j < n; ++j) {
      if (graph_.connected(i, j)) {
        best = std::max(best, graph_.snr_db(i, j));
        any = true;
      }
    }
    if (any) {
      tr.throughput[static_cast<std::size_t>(i)] = normalized_throughput(
          best, 1.0 - world_.uavs[static_cast<std::size_t>(i)].pilot_density, config_.phy);
    }
    throughput_sum += tr.throughput[static_cast<std::size_t>(i)];
  }

  int detected_count = 0;
  double spread = 0.0;
  for (int j = 0; j < m; ++j) {
    if (!detected[static_cast<std::size_t>(j)]) continue;
    ++detected_count;
    spread += static_cast<double>(knowledge_.count_column(j)) / n;
  }
  tr.knowledge_spread = detected_count > 0 ? spread / detected_count : 0.0;

  potential_ = distance_potential(world_, config_.rewards);
  tr.potential_after = potential_;

  RewardInputs in;
  in.newly_detected = static_cast<int>(tr.newly_detected.size());
  in.newly_informed = static_cast<int>(tr.newly_informed.size());
  in.completed = done_;
  in.new_cells = tr.new_cells;
  in.cell_count = grid.cell_count();
  in.total_energy_kwh = total_energy;
  in.total_co2_kg = tr.co2_kg;
  in.charging_agents = charging;
  in.carbon_intensity = carbon_intensity_;
  in.revisit_count = tr.revisit_count;
  in.truncated = truncated_;
  in.mean_throughput = throughput_sum / n;
  in.knowledge_spread = tr.knowledge_spread;
  in.potential_before = tr.potential_before;
  in.potential_after = tr.potential_after;
  tr.terms = compute_reward(in, config_.rewards);
  tr.team_reward = tr.terms.total();
  tr.done = done_;
  tr.truncated = truncated_;

  tr.positions.reserve(un);
  tr.battery_kwh.reserve(un);
  tr.returning.reserve(un);
  tr.inert.reserve(un);
  for (const UavState& u : world_.uavs) {
    tr.positions.push_back(u.cell);
    tr.battery_kwh.push_back(u.battery_kwh);
    tr.returning.push_back(u.returning_to_base ? 1 : 0);
    tr.inert.push_back(u.inert ? 1 : 0);
  }

  // (10) observations
  StepResult result;
  result.observations = observations();
  result.reward = tr.team_reward;
  result.done = done_;
  result.truncated = truncated_;
  result.transition = std::move(tr);
  return result;
}

}  // namespace jcas
