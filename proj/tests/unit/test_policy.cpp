#include <gtest/gtest.h>

#include "jcas/env.hpp"
#include "jcas/policy.hpp"
#include "support/builders.hpp"

using namespace jcas;
using jcas::testing::make_world;

namespace {

// Single UAV on an otherwise empty mission (one unreachable hotspot keeps the
// episode open). Returns the number of steps until every cell was visited.
int steps_to_full_coverage(int w, int h, bool* revisited_early, int* covered = nullptr) {
  EnvConfig cfg;
  cfg.grid.width_cells = w;
  cfg.grid.height_cells = h;
  cfg.n_uavs = 1;
  cfg.n_targets = 1;
  cfg.theta_detect = 2;
  cfg.t_max = 4 * w * h;
  cfg.energy.b_max_kwh = 10.0;  // no return-to-base detours
  cfg.energy.rtb_threshold_kwh = 0.0;
  Environment env(cfg);
  env.reset(make_world(cfg.grid, {{0, 0}}, {{w - 1, h - 1}}, 0.30, 10.0), 0);
  const SweepPolicy policy(sweep_config_for(cfg, PilotMode::Constant, 0.0));
  Rng rng(0);
  int visited = 1;
  *revisited_early = false;
  for (int t = 1; t <= cfg.t_max; ++t) {
    const auto obs = env.observations();
    const ActionVector a = policy.act(obs[0], rng);
    const StepResult r = env.step(std::span<const ActionVector>(&a, 1));
    visited += r.transition.new_cells;
    if (r.transition.revisit_count > 0 && visited < w * h) *revisited_early = true;
    if (visited == w * h) return t;
  }
  if (covered != nullptr) *covered = visited;
  return -1;
}

int cells_covered(int w, int h) {
  bool early = false;
  int covered = w * h;
  steps_to_full_coverage(w, h, &early, &covered);
  return covered;
}

}  // namespace

TEST(RandomPolicyTest, BoundedReproducibleCentred) {
  const RandomPolicy p;
  const std::vector<double> obs(31, 0.0);
  Rng a(3), b(3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const ActionVector x = p.act(obs, a);
    const ActionVector y = p.act(obs, b);
    ASSERT_EQ(x.u_dir, y.u_dir);
    ASSERT_EQ(x.u_pilot, y.u_pilot);
    ASSERT_GE(x.u_dir, -1.0);
    ASSERT_LE(x.u_dir, 1.0);
    ASSERT_GE(x.u_pilot, -1.0);
    ASSERT_LE(x.u_pilot, 1.0);
    sum += x.u_pilot;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
}

TEST(SweepPolicyTest, LawnmowerCoversTwelveByTwelve) {
  bool early = true;
  const int steps = steps_to_full_coverage(12, 12, &early);
  ASSERT_GT(steps, 0);
  EXPECT_LE(steps, 12 * 12 + 12);
  EXPECT_EQ(steps, 12 * 12 - 1);  // Hamiltonian: one new cell per move
  EXPECT_FALSE(early);
}

TEST(SweepPolicyTest, LawnmowerCoversOtherShapes) {
  for (auto [w, h] : std::vector<std::pair<int, int>>{{8, 8}, {4, 7}, {9, 4}, {2, 3}, {1, 6}, {3, 2}, {6, 5}}) {
    bool early = true;
    const int steps = steps_to_full_coverage(w, h, &early);
    EXPECT_EQ(steps, w * h - 1) << w << "x" << h;
    EXPECT_FALSE(early) << w << "x" << h;
  }
}

// Odd by odd grids have no Hamiltonian cycle; the stateless sweep leaves one cell.
TEST(SweepPolicyTest, LawnmowerOddByOddMissesOneCell) {
  for (auto [w, h] : std::vector<std::pair<int, int>>{{5, 7}, {3, 3}, {9, 5}}) {
    bool early = false;
    EXPECT_EQ(steps_to_full_coverage(w, h, &early), -1) << w << "x" << h;
    EXPECT_EQ(cells_covered(w, h), w * h - 1) << w << "x" << h;
  }
}

TEST(SweepPolicyTest, ConstantPilotAlwaysThirtyPercent) {
  EnvConfig cfg;
  Environment env(cfg);
  env.reset(11);
  const SweepPolicy policy(sweep_config_for(cfg, PilotMode::Constant, 0.1));
  Rng rng(1);
  while (!env.finished()) {
    std::vector<ActionVector> actions;
    for (const Observation& o : env.observations()) actions.push_back(policy.act(o, rng));
    const StepResult r = env.step(actions);
    for (const DecodedAction& d : r.transition.decoded) ASSERT_EQ(d.pilot_density, 0.30);
  }
}

TEST(SweepPolicyTest, AdaptivePilotFollowsHotspotProximity) {
  EnvConfig cfg;
  cfg.n_uavs = 1;
  cfg.n_targets = 2;
  cfg.theta_detect = 2;
  const SweepPolicy policy(sweep_config_for(cfg, PilotMode::Adaptive, 0.0));
  Environment env(cfg);
  Rng rng(0);

  // Far from both hotspots.
  env.reset(make_world(cfg.grid, {{0, 0}}, {{8, 8}, {11, 2}}), 0);
  EXPECT_EQ(policy.pilot_for(env.observations()[0]), 0.05);
  const ActionVector far = policy.act(env.observations()[0], rng);
  EXPECT_NEAR(decode_action(far, cfg.phy).pilot_density, 0.05, 1e-15);

  // Three cells away counts as near; four does not.
  env.reset(make_world(cfg.grid, {{5, 5}}, {{8, 5}, {0, 11}}), 0);
  EXPECT_EQ(policy.pilot_for(env.observations()[0]), 0.30);
  env.reset(make_world(cfg.grid, {{4, 5}}, {{8, 5}, {0, 11}}), 0);
  EXPECT_EQ(policy.pilot_for(env.observations()[0]), 0.05);

  // A hotspot already confirmed and known no longer holds the pilot high.
  WorldState w = make_world(cfg.grid, {{5, 5}}, {{6, 5}, {0, 11}});
  w.hotspots[0].detected_at = 0;
  env.reset(w, 0);
  Observation obs = env.observations()[0];
  const ObservationLayout l{2, 4};
  obs[static_cast<std::size_t>(l.hotspot(0) + 3)] = 1.0;
  EXPECT_EQ(policy.pilot_for(obs), 0.05);
  obs[static_cast<std::size_t>(l.hotspot(0) + 3)] = 0.0;
  EXPECT_EQ(policy.pilot_for(obs), 0.30);
}

TEST(MlpPolicyTest, SharedWeightsSameDistribution) {
  EnvConfig cfg;
  Rng init(5);
  const PolicyWeights w = PolicyWeights::initialize({cfg.observation_dim(), {16, 16}}, init, -0.5);
  Environment env(cfg);
  const auto obs = env.reset(2);  // co-located agents see identical observations
  ASSERT_EQ(obs[0], obs[1]);
  const PolicyOutput a = mlp_forward(obs[0], w);
  const PolicyOutput b = mlp_forward(obs[1], w);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.log_std, b.log_std);
  const MlpPolicy det(w, true);
  Rng r1(1), r2(2);
  const ActionVector x = det.act(obs[0], r1);
  const ActionVector y = det.act(obs[0], r2);
  EXPECT_EQ(x.u_dir, y.u_dir);
  EXPECT_NEAR(x.u_dir, std::clamp(a.mean[0], -1.0, 1.0), 0.0);
}
