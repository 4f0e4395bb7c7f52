#pragma once

// Grid geometry, mission spawning and UAV kinematics.
//
// Axis convention: origin at the top-left cell, x grows to the right and y
// grows downwards, so "up" is y - 1.

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace jcas {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class Direction : std::uint8_t { Up, Down, Left, Right, Stay };

const char* to_string(Direction d);

struct GridSpec {
  int width_cells = 12;
  int height_cells = 12;
  double cell_size_m = 50.0;
  std::vector<Cell> depot_cells{Cell{0, 0}};

  void validate() const;

  int cell_count() const { return width_cells * height_cells; }
  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_cells && c.y < height_cells;
  }
  int index_of(Cell c) const { return c.y * width_cells + c.x; }
  bool is_depot(Cell c) const;

  bool operator==(const GridSpec&) const = default;
};

struct UavState {
  Cell cell;
  double battery_kwh = 0.0;
  double pilot_density = 0.0;
  bool returning_to_base = false;
  // Battery ran dry away from a depot: no motion, sensing or comm for the rest
  // of the episode.
  bool inert = false;

  bool operator==(const UavState&) const = default;
};

struct Hotspot {
  Cell cell;
  std::optional<int> detected_at;
  std::optional<int> informed_at;

  bool detected() const { return detected_at.has_value(); }
  bool informed() const { return informed_at.has_value(); }
  bool operator==(const Hotspot&) const = default;
};

struct WorldState {
  GridSpec grid;
  std::vector<UavState> uavs;
  std::vector<Hotspot> hotspots;
  int t = 0;
  // One flag per cell, row-major: has any UAV ever occupied it.
  std::vector<std::uint8_t> visited;

  bool operator==(const WorldState&) const = default;
};

/// Fresh mission: hotspots on distinct non-depot cells drawn uniformly from a
/// stream seeded with `seed`; every UAV starts on the first depot with a full
/// battery and the minimum pilot density. Throws ConfigError for infeasible
/// counts.
WorldState spawn_mission(std::uint64_t seed, const GridSpec& grid, int n_uavs, int n_targets,
                         double battery_kwh, double pilot_density);

/// Neighbour in `direction`; a move that would leave the grid becomes a stay.
Cell apply_move(Cell cell, Direction direction, const GridSpec& grid);

double cell_distance_m(Cell a, Cell b, double cell_size_m);

int manhattan_distance(Cell a, Cell b);

Cell nearest_depot(Cell from, const GridSpec& grid);

/// One greedy Manhattan step from `from` toward `to` (x first, then y).
Direction step_toward(Cell from, Cell to);

}  // namespace jcas
