#include "jcas/policy.hpp"

#include <algorithm>
#include <cmath>

namespace jcas {

ActionVector RandomPolicy::act(std::span<const double>, Rng& rng) const {
  const double u_dir = rng.uniform(-1.0, 1.0);
  const double u_pilot = rng.uniform(-1.0, 1.0);
  return {u_dir, u_pilot};
}

SweepPolicy::SweepPolicy(SweepPolicyConfig config)
    : config_(config), layout_{config.n_targets, config.neighbor_slots} {}

std::string SweepPolicy::name() const {
  return config_.mode == PilotMode::Constant ? "constant-pilot" : "adaptive-pilot";
}

Direction SweepPolicy::sweep_direction(Cell c) const {
  const int w = config_.width_cells;
  const int h = config_.height_cells;
  if (w == 1) return c.y + 1 < h ? Direction::Down : Direction::Up;
  if (c.x == 0) return c.y > 0 ? Direction::Up : Direction::Right;
  if (h % 2 == 1 && h > 1 && c.y >= h - 2) {
    // Odd height: the bottom two rows are swept column by column. With odd
    // width too no stateless cycle exists and (1, h-2) is skipped.
    const bool entered_top = (w - 1 - c.x) % 2 == 0;
    if (c.x == 1) return c.y == h - 2 && entered_top ? Direction::Down : Direction::Left;
    if (c.y == h - 2) return entered_top ? Direction::Down : Direction::Left;
    return entered_top ? Direction::Left : Direction::Up;
  }
  const bool last_row = c.y == h - 1;
  if (last_row && h > 1) return Direction::Left;
  if (c.y % 2 == 0) return c.x == w - 1 ? Direction::Down : Direction::Right;
  return c.x == 1 ? Direction::Down : Direction::Left;
}

double SweepPolicy::pilot_for(std::span<const double> obs) const {
  if (config_.mode == PilotMode::Constant) return config_.constant_pilot;
  for (int j = 0; j < config_.n_targets; ++j) {
    const auto base = static_cast<std::size_t>(layout_.hotspot(j));
    const bool detected = obs[base + 2] > 0.5;
    const bool known = obs[base + 3] > 0.5;
    if (detected && known) continue;
    const double dx = std::round(obs[base] * config_.width_cells);
    const double dy = std::round(obs[base + 1] * config_.height_cells);
    if (std::hypot(dx, dy) <= config_.adaptive_radius_cells) return config_.adaptive_high_pilot;
  }
  return config_.adaptive_low_pilot;
}

ActionVector SweepPolicy::act(std::span<const double> obs, Rng& rng) const {
  const auto pos = static_cast<std::size_t>(ObservationLayout::kPosition);
  const Cell cell{
      static_cast<int>(std::lround(obs[pos] * std::max(config_.width_cells - 1, 0))),
      static_cast<int>(std::lround(obs[pos + 1] * std::max(config_.height_cells - 1, 0)))};

  Direction dir = sweep_direction(cell);
  if (config_.jitter > 0.0 && rng.uniform01() < config_.jitter) {
    dir = static_cast<Direction>(rng.uniform_index(5));
  }
  JcasParams bounds;
  bounds.pilot_min = config_.pilot_min;
  bounds.pilot_max = config_.pilot_max;
  return {direction_to_action(dir), pilot_to_action(pilot_for(obs), bounds)};
}

MlpPolicy::MlpPolicy(PolicyWeights weights, bool deterministic)
    : weights_(std::move(weights)), deterministic_(deterministic) {}

ActionVector MlpPolicy::act(std::span<const double> observation, Rng& rng) const {
  const PolicyOutput out = mlp_forward(observation, weights_);
  if (deterministic_) {
    return {std::clamp(out.mean[0], -1.0, 1.0), std::clamp(out.mean[1], -1.0, 1.0)};
  }
  return sample_action(out, rng).action;
}

SweepPolicyConfig sweep_config_for(const EnvConfig& env, PilotMode mode, double jitter) {
  SweepPolicyConfig c;
  c.mode = mode;
  c.width_cells = env.grid.width_cells;
  c.height_cells = env.grid.height_cells;
  c.n_targets = env.n_targets;
  c.neighbor_slots = env.neighbor_slots;
  c.pilot_min = env.phy.pilot_min;
  c.pilot_max = env.phy.pilot_max;
  c.jitter = jitter;
  return c;
}

}  // namespace jcas
