#include "jcas/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "jcas/errors.hpp"
#include "jcas/rng.hpp"

namespace jcas {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::Stay: return "stay";
  }
  return "?";
}

void GridSpec::validate() const {
  if (width_cells < 1 || height_cells < 1) throw ConfigError("GridSpec: grid must be at least 1x1");
  if (!(cell_size_m > 0.0)) throw ConfigError("GridSpec: cell_size_m must be > 0");
  if (depot_cells.empty()) throw ConfigError("GridSpec: at least one depot is required");
  for (const Cell& d : depot_cells) {
    if (!contains(d)) {
      throw ConfigError("GridSpec: depot (" + std::to_string(d.x) + "," + std::to_string(d.y) +
                        ") lies outside the grid");
    }
  }
}

bool GridSpec::is_depot(Cell c) const {
  return std::find(depot_cells.begin(), depot_cells.end(), c) != depot_cells.end();
}

WorldState spawn_mission(std::uint64_t seed, const GridSpec& grid, int n_uavs, int n_targets,
                         double battery_kwh, double pilot_density) {
  grid.validate();
  if (n_uavs < 1) throw ConfigError("spawn_mission: need at least one UAV");

  std::vector<Cell> candidates;
  candidates.reserve(static_cast<std::size_t>(grid.cell_count()));
  for (int y = 0; y < grid.height_cells; ++y) {
    for (int x = 0; x < grid.width_cells; ++x) {
      if (!grid.is_depot({x, y})) candidates.push_back({x, y});
    }
  }
  if (n_targets < 0 || static_cast<std::size_t>(n_targets) > candidates.size()) {
    throw ConfigError("spawn_mission: " + std::to_string(n_targets) +
                      " hotspots do not fit on " + std::to_string(candidates.size()) +
                      " non-depot cells");
  }

  WorldState world;
  world.grid = grid;
  world.visited.assign(static_cast<std::size_t>(grid.cell_count()), 0);

  // Partial Fisher-Yates: the first n_targets slots become the hotspots.
  Rng rng(seed);
  for (int i = 0; i < n_targets; ++i) {
    const auto remaining = candidates.size() - static_cast<std::size_t>(i);
    const auto j = static_cast<std::size_t>(i) + rng.uniform_index(remaining);
    std::swap(candidates[static_cast<std::size_t>(i)], candidates[j]);
    world.hotspots.push_back(Hotspot{candidates[static_cast<std::size_t>(i)], {}, {}});
  }

  const Cell start = grid.depot_cells.front();
  world.uavs.assign(static_cast<std::size_t>(n_uavs),
                    UavState{start, battery_kwh, pilot_density, false, false});
  world.visited[static_cast<std::size_t>(grid.index_of(start))] = 1;
  return world;
}

Cell apply_move(Cell cell, Direction direction, const GridSpec& grid) {
  Cell next = cell;
  switch (direction) {
    case Direction::Up: --next.y; break;
    case Direction::Down: ++next.y; break;
    case Direction::Left: --next.x; break;
    case Direction::Right: ++next.x; break;
    case Direction::Stay: break;
  }
  return grid.contains(next) ? next : cell;
}

double cell_distance_m(Cell a, Cell b, double cell_size_m) {
  return cell_size_m * std::hypot(static_cast<double>(a.x - b.x), static_cast<double>(a.y - b.y));
}

int manhattan_distance(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

Cell nearest_depot(Cell from, const GridSpec& grid) {
  Cell best = grid.depot_cells.front();
  int best_d = manhattan_distance(from, best);
  for (const Cell& d : grid.depot_cells) {
    const int dist = manhattan_distance(from, d);
    if (dist < best_d) {
      best = d;
      best_d = dist;
    }
  }
  return best;
}

Direction step_toward(Cell from, Cell to) {
  if (to.x < from.x) return Direction::Left;
  if (to.x > from.x) return Direction::Right;
  if (to.y < from.y) return Direction::Up;
  if (to.y > from.y) return Direction::Down;
  return Direction::Stay;
}

}  // namespace jcas
