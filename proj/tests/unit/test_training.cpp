#include <gtest/gtest.h>

#include <sstream>

#include "jcas/errors.hpp"
#include "jcas/training.hpp"
#include "support/temp_dir.hpp"

using namespace jcas;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.env.grid.width_cells = 6;
  c.env.grid.height_cells = 6;
  c.env.n_uavs = 3;
  c.env.n_targets = 2;
  c.env.t_max = 30;
  c.marl.hidden = {16, 16};
  c.marl.num_envs = 2;
  c.marl.ppo.batch_steps = 64;
  c.marl.ppo.minibatch = 64;
  c.marl.ppo.epochs = 2;
  c.marl.checkpoint_every = 2;
  return c;
}

}  // namespace

TEST(Rollouts, BatchShapeAndReproducibility) {
  const ExperimentConfig c = tiny_config();
  Rng rng(1);
  const PolicyWeights w = PolicyWeights::initialize({c.env.observation_dim(), c.marl.hidden}, rng);
  const RolloutResult a = collect_rollouts(c.env, w, c.marl.ppo, 5, 2, 64, 1);
  EXPECT_EQ(a.env_steps, 64);
  EXPECT_EQ(a.batch.size(), 64 * 3);
  EXPECT_EQ(a.batch.observations.rows(), c.env.observation_dim());
  EXPECT_TRUE(a.batch.advantages.allFinite());
  EXPECT_TRUE(a.batch.returns.allFinite());
  EXPECT_GE(a.episode_returns.size(), 2u);  // 32 steps per env, t_max 30
  const RolloutResult b = collect_rollouts(c.env, w, c.marl.ppo, 5, 2, 64, 2);
  EXPECT_EQ(a.batch.observations, b.batch.observations);
  EXPECT_EQ(a.batch.advantages, b.batch.advantages);
  EXPECT_EQ(a.episode_returns, b.episode_returns);
}

TEST(Train, LogRowsCheckpointsAndCsv) {
  jcas::testing::TempDir dir("train");
  TrainOptions o;
  o.iterations = 3;
  o.seed = 9;
  o.checkpoint_dir = dir.path();
  std::vector<IterationLog> seen;
  const TrainResult r = train(tiny_config(), o, [&](const IterationLog& l) { seen.push_back(l); });
  ASSERT_EQ(r.log.size(), 3u);
  EXPECT_EQ(seen.size(), 3u);
  EXPECT_EQ(r.log[2].iteration, 3);
  EXPECT_EQ(r.checkpoint.iteration, 3u);
  EXPECT_TRUE(std::filesystem::exists(dir / "iter_000002.ckpt"));
  EXPECT_FALSE(std::filesystem::exists(dir / "iter_000003.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "latest.ckpt"));
  for (const IterationLog& l : r.log) {
    EXPECT_GE(l.clip_fraction, 0.0);
    EXPECT_LE(l.clip_fraction, 1.0);
    EXPECT_TRUE(std::isfinite(l.policy_loss));
  }
  std::ostringstream csv;
  write_iteration_csv_header(csv);
  for (const IterationLog& l : r.log) write_iteration_csv_row(csv, l);
  EXPECT_EQ(csv.str().rfind("iteration,env_steps,episodes,mean_return,", 0), 0u);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Train, ResumeReproducesUninterruptedRun) {
  jcas::testing::TempDir dir("resume");
  const ExperimentConfig c = tiny_config();
  TrainOptions full;
  full.iterations = 4;
  full.seed = 21;
  const TrainResult straight = train(c, full);

  TrainOptions first = full;
  first.iterations = 2;
  first.checkpoint_dir = dir.path();
  train(c, first);
  TrainOptions second = full;
  second.resume_from = dir / "latest.ckpt";
  const TrainResult resumed = train(c, second);

  ASSERT_EQ(resumed.log.size(), 2u);
  for (int k = 0; k < 2; ++k) {
    const IterationLog& a = straight.log[static_cast<std::size_t>(k + 2)];
    const IterationLog& b = resumed.log[static_cast<std::size_t>(k)];
    EXPECT_EQ(a.iteration, b.iteration);
    EXPECT_EQ(a.mean_return, b.mean_return);
    EXPECT_EQ(a.policy_loss, b.policy_loss);
    EXPECT_EQ(a.approx_kl, b.approx_kl);
  }
  EXPECT_EQ(straight.checkpoint.weights.params(), resumed.checkpoint.weights.params());
}

TEST(Train, ResumeWithOtherSeedRejected) {
  jcas::testing::TempDir dir("seed");
  TrainOptions o;
  o.iterations = 1;
  o.seed = 1;
  o.checkpoint_dir = dir.path();
  train(tiny_config(), o);
  o.iterations = 2;
  o.seed = 2;
  o.resume_from = dir / "latest.ckpt";
  EXPECT_THROW(train(tiny_config(), o), ConfigError);
}

TEST(Train, WorkerCountDoesNotChangeTraining) {
  TrainOptions o;
  o.iterations = 2;
  o.seed = 4;
  const TrainResult a = train(tiny_config(), o);
  o.workers = 2;
  const TrainResult b = train(tiny_config(), o);
  EXPECT_EQ(a.checkpoint.weights.params(), b.checkpoint.weights.params());
}
