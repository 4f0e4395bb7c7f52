#include <benchmark/benchmark.h>

#include <vector>

#include "jcas/env.hpp"
#include "jcas/evaluation.hpp"
#include "jcas/knowledge_net.hpp"
#include "jcas/mlp.hpp"
#include "jcas/policy.hpp"

using namespace jcas;

// One environment step with random actions; resets when the episode ends.
static void BM_EnvStep(benchmark::State& state) {
  EnvConfig cfg;
  cfg.n_uavs = static_cast<int>(state.range(0));
  Environment env(cfg);
  env.reset(1);
  Rng rng(2);
  std::vector<ActionVector> actions(static_cast<std::size_t>(cfg.n_uavs));
  std::uint64_t episode = 0;
  for (auto _ : state) {
    if (env.finished()) env.reset(++episode);
    for (ActionVector& a : actions) a = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    benchmark::DoNotOptimize(env.step(actions));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

static void BM_Propagate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  EnvConfig cfg;
  cfg.n_uavs = n;
  cfg.n_targets = 5;
  Environment env(cfg);
  env.reset(3);
  Rng rng(4);
  KnowledgeMatrix k(n, 5);
  for (int i = 0; i < n; ++i) k.set(i, static_cast<int>(rng.uniform_index(5)));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(k, env.graph()));
}
BENCHMARK(BM_Propagate)->Arg(5)->Arg(20)->Arg(64);

static void BM_MlpForwardBatch(benchmark::State& state) {
  const MlpShape shape{31, {512, 256, 128}};
  Rng rng(5);
  const PolicyWeights w = PolicyWeights::initialize(shape, rng, -0.5);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Random(31, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(obs, w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

static void BM_Episode(benchmark::State& state) {
  EnvConfig cfg;
  cfg.n_uavs = 10;
  const SweepPolicy policy(sweep_config_for(cfg, PilotMode::Adaptive, 0.1));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(cfg, policy, ++seed));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
