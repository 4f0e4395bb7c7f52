#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "jcas/errors.hpp"
#include "jcas/rng.hpp"
#include "jcas/world.hpp"

using namespace jcas;

TEST(Spawn, SameSeedSameWorld) {
  const GridSpec g;
  EXPECT_EQ(spawn_mission(42, g, 5, 3, 0.2, 0.01), spawn_mission(42, g, 5, 3, 0.2, 0.01));
  EXPECT_NE(spawn_mission(42, g, 5, 3, 0.2, 0.01), spawn_mission(43, g, 5, 3, 0.2, 0.01));
}

TEST(Spawn, HotspotsDistinctAndOffDepot) {
  const GridSpec g;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const WorldState w = spawn_mission(seed, g, 5, 11, 0.2, 0.01);
    std::set<Cell> cells;
    for (const Hotspot& h : w.hotspots) {
      EXPECT_TRUE(g.contains(h.cell));
      EXPECT_FALSE(g.is_depot(h.cell));
      EXPECT_FALSE(h.detected());
      cells.insert(h.cell);
    }
    EXPECT_EQ(cells.size(), 11u);
  }
}

TEST(Spawn, UavsStartFullAtFirstDepot) {
  GridSpec g;
  g.depot_cells = {Cell{6, 6}, Cell{0, 0}};
  const WorldState w = spawn_mission(1, g, 4, 3, 0.2, 0.01);
  ASSERT_EQ(w.uavs.size(), 4u);
  for (const UavState& u : w.uavs) {
    EXPECT_EQ(u.cell, (Cell{6, 6}));
    EXPECT_EQ(u.battery_kwh, 0.2);
    EXPECT_EQ(u.pilot_density, 0.01);
    EXPECT_FALSE(u.returning_to_base);
    EXPECT_FALSE(u.inert);
  }
  EXPECT_EQ(w.t, 0);
  EXPECT_EQ(w.visited[static_cast<std::size_t>(g.index_of({6, 6}))], 1);
}

TEST(Spawn, ExhaustsEveryFreeCell) {
  GridSpec g;
  g.width_cells = 4;
  g.height_cells = 3;
  const WorldState w = spawn_mission(9, g, 1, 11, 0.2, 0.01);
  std::set<Cell> cells;
  for (const Hotspot& h : w.hotspots) cells.insert(h.cell);
  EXPECT_EQ(cells.size(), 11u);
  EXPECT_FALSE(cells.count(Cell{0, 0}));
}

TEST(Spawn, InfeasibleCountsRejected) {
  GridSpec g;
  g.width_cells = 4;
  g.height_cells = 3;
  EXPECT_THROW(spawn_mission(0, g, 1, 12, 0.2, 0.01), ConfigError);
  EXPECT_THROW(spawn_mission(0, g, 0, 1, 0.2, 0.01), ConfigError);
  EXPECT_THROW(spawn_mission(0, g, 1, -1, 0.2, 0.01), ConfigError);
}

TEST(Spawn, HotspotPlacementRoughlyUniform) {
  GridSpec g;
  g.width_cells = 3;
  g.height_cells = 3;
  std::vector<int> hits(9, 0);
  const int trials = 40000;
  for (int s = 0; s < trials; ++s) {
    const WorldState w = spawn_mission(static_cast<std::uint64_t>(s), g, 1, 1, 0.2, 0.01);
    ++hits[static_cast<std::size_t>(g.index_of(w.hotspots[0].cell))];
  }
  EXPECT_EQ(hits[0], 0);
  for (int i = 1; i < 9; ++i) EXPECT_NEAR(hits[static_cast<std::size_t>(i)], trials / 8, 300) << i;
}

TEST(Moves, AxisConvention) {
  const GridSpec g;
  EXPECT_EQ(apply_move({5, 5}, Direction::Up, g), (Cell{5, 4}));
  EXPECT_EQ(apply_move({5, 5}, Direction::Down, g), (Cell{5, 6}));
  EXPECT_EQ(apply_move({5, 5}, Direction::Left, g), (Cell{4, 5}));
  EXPECT_EQ(apply_move({5, 5}, Direction::Right, g), (Cell{6, 5}));
  EXPECT_EQ(apply_move({5, 5}, Direction::Stay, g), (Cell{5, 5}));
  EXPECT_EQ(apply_move(apply_move({5, 5}, Direction::Up, g), Direction::Down, g), (Cell{5, 5}));
}

TEST(Moves, ClampAtBoundary) {
  const GridSpec g;
  EXPECT_EQ(apply_move({0, 0}, Direction::Left, g), (Cell{0, 0}));
  EXPECT_EQ(apply_move({0, 0}, Direction::Up, g), (Cell{0, 0}));
  EXPECT_EQ(apply_move({11, 11}, Direction::Right, g), (Cell{11, 11}));
  EXPECT_EQ(apply_move({11, 11}, Direction::Down, g), (Cell{11, 11}));
}

TEST(Moves, RandomWalkStaysInGrid) {
  GridSpec g;
  g.width_cells = 5;
  g.height_cells = 2;
  Rng rng(3);
  Cell c{0, 0};
  for (int i = 0; i < 20000; ++i) {
    c = apply_move(c, static_cast<Direction>(rng.uniform_index(5)), g);
    ASSERT_TRUE(g.contains(c));
  }
}

TEST(Distances, Euclidean) {
  EXPECT_EQ(cell_distance_m({3, 3}, {3, 3}, 50.0), 0.0);
  EXPECT_DOUBLE_EQ(cell_distance_m({3, 3}, {4, 3}, 50.0), 50.0);
  EXPECT_NEAR(cell_distance_m({3, 3}, {4, 4}, 50.0), 70.71067811865476, 1e-12);
  EXPECT_EQ(manhattan_distance({0, 0}, {3, -4}), 7);
}

TEST(Distances, NearestDepotAndGreedyStep) {
  GridSpec g;
  g.depot_cells = {Cell{0, 0}, Cell{11, 11}};
  EXPECT_EQ(nearest_depot({2, 3}, g), (Cell{0, 0}));
  EXPECT_EQ(nearest_depot({9, 8}, g), (Cell{11, 11}));
  EXPECT_EQ(step_toward({2, 3}, {0, 0}), Direction::Left);
  EXPECT_EQ(step_toward({0, 3}, {0, 0}), Direction::Up);
  EXPECT_EQ(step_toward({0, 0}, {0, 0}), Direction::Stay);
  EXPECT_EQ(step_toward({0, 0}, {0, 2}), Direction::Down);
}

TEST(GridSpecValidate, RejectsBadGeometry) {
  GridSpec g;
  EXPECT_NO_THROW(g.validate());
  g.cell_size_m = 0.0;
  EXPECT_THROW(g.validate(), ConfigError);
  g = GridSpec{};
  g.depot_cells = {Cell{12, 0}};
  EXPECT_THROW(g.validate(), ConfigError);
  g = GridSpec{};
  g.depot_cells.clear();
  EXPECT_THROW(g.validate(), ConfigError);
}
