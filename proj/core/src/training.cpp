#include "jcas/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <thread>

#include "jcas/env.hpp"
#include "jcas/errors.hpp"

namespace jcas {

namespace {

// Per-environment slice of a rollout, merged in environment order.
struct EnvRollout {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Eigen::Vector2d> actions;
  std::vector<double> log_probs;
  std::vector<double> values;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<double> episode_returns;
};

Eigen::MatrixXd stack(const std::vector<Observation>& obs, int dim) {
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(obs[i].data(), static_cast<Eigen::Index>(obs[i].size()));
  }
  return m;
}

EnvRollout rollout_one(const EnvConfig& config, const PolicyWeights& weights, const PpoHyper& hyper,
                       std::uint64_t env_seed, int steps) {
  const int n = config.n_uavs;
  const int dim = config.observation_dim();
  Environment env(config);
  Rng rng(derive_seed(env_seed, 0x5A));
  int episode = 0;
  std::vector<Observation> obs = env.reset(derive_seed(env_seed, static_cast<std::uint64_t>(episode)));
  // Zero-hotspot configurations finish at reset; keep drawing episodes.
  while (env.finished()) obs = env.reset(derive_seed(env_seed, static_cast<std::uint64_t>(++episode)));

  // Per-agent streams, time-major.
  struct Stream {
    std::vector<Eigen::VectorXd> obs;
    std::vector<Eigen::Vector2d> actions;
    std::vector<double> log_probs, values, rewards;
    std::vector<std::uint8_t> dones;
  };
  std::vector<Stream> streams(static_cast<std::size_t>(n));
  EnvRollout out;
  double running_return = 0.0;
  std::vector<ActionVector> actions(static_cast<std::size_t>(n));

  for (int t = 0; t < steps; ++t) {
    const Eigen::MatrixXd obs_mat = stack(obs, dim);
    const BatchForward f = forward_batch(obs_mat, weights);
    const Eigen::Vector2d log_std = weights.log_std();
    for (int i = 0; i < n; ++i) {
      PolicyOutput po;
      po.mean = f.mean.col(i);
      po.log_std = log_std;
      po.value = f.value[i];
      const SampledAction s = sample_action(po, rng);
      actions[static_cast<std::size_t>(i)] = s.action;
      Stream& st = streams[static_cast<std::size_t>(i)];
      st.obs.push_back(obs_mat.col(i));
      st.actions.push_back(s.raw);
      st.log_probs.push_back(s.log_prob);
      st.values.push_back(po.value);
    }
    StepResult r = env.step(actions);
    running_return += r.reward;
    const bool finished = r.done || r.truncated;
    std::vector<double> bootstrap(static_cast<std::size_t>(n), 0.0);
    if (r.truncated) {
      const BatchForward fb = forward_batch(stack(r.observations, dim), weights);
      for (int i = 0; i < n; ++i) bootstrap[static_cast<std::size_t>(i)] = hyper.gamma * fb.value[i];
    }
    for (int i = 0; i < n; ++i) {
      Stream& st = streams[static_cast<std::size_t>(i)];
      st.rewards.push_back(r.reward + bootstrap[static_cast<std::size_t>(i)]);
      st.dones.push_back(finished ? 1 : 0);
    }
    if (finished) {
      out.episode_returns.push_back(running_return);
      running_return = 0.0;
      do {
        obs = env.reset(derive_seed(env_seed, static_cast<std::uint64_t>(++episode)));
      } while (env.finished());
    } else {
      obs = std::move(r.observations);
    }
  }

  const BatchForward tail = forward_batch(stack(obs, dim), weights);
  for (int i = 0; i < n; ++i) {
    Stream& st = streams[static_cast<std::size_t>(i)];
    std::vector<double> values = st.values;
    values.push_back(tail.value[i]);
    const GaeResult gae = compute_gae(st.rewards, values, st.dones, hyper.gamma, hyper.gae_lambda);
    for (std::size_t k = 0; k < st.rewards.size(); ++k) {
      out.observations.push_back(std::move(st.obs[k]));
      out.actions.push_back(st.actions[k]);
      out.log_probs.push_back(st.log_probs[k]);
      out.values.push_back(st.values[k]);
      out.advantages.push_back(gae.advantages[k]);
      out.returns.push_back(gae.returns[k]);
    }
  }
  return out;
}

std::string iteration_file(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%06d.ckpt", iteration);
  return buf;
}

}  // namespace

RolloutResult collect_rollouts(const EnvConfig& env, const PolicyWeights& weights,
                               const PpoHyper& hyper, std::uint64_t seed, int num_envs,
                               int env_steps, int workers) {
  if (num_envs < 1) throw ConfigError("collect_rollouts: num_envs must be >= 1");
  const int per_env = (env_steps + num_envs - 1) / num_envs;
  std::vector<EnvRollout> parts(static_cast<std::size_t>(num_envs));

  auto run = [&](int e) {
    parts[static_cast<std::size_t>(e)] =
        rollout_one(env, weights, hyper, derive_seed(seed, static_cast<std::uint64_t>(e)), per_env);
  };
  const int n_threads = std::clamp(workers, 1, num_envs);
  if (n_threads == 1) {
    for (int e = 0; e < num_envs; ++e) run(e);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (int e = t; e < num_envs; e += n_threads) run(e);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t total = 0;
  for (const EnvRollout& p : parts) total += p.log_probs.size();
  RolloutResult result;
  result.env_steps = static_cast<std::int64_t>(per_env) * num_envs;
  RolloutBatch& b = result.batch;
  const auto s = static_cast<Eigen::Index>(total);
  b.observations.resize(env.observation_dim(), s);
  b.actions.resize(kActionDim, s);
  b.log_probs.resize(s);
  b.values.resize(s);
  b.advantages.resize(s);
  b.returns.resize(s);
  Eigen::Index k = 0;
  for (const EnvRollout& p : parts) {
    for (std::size_t i = 0; i < p.log_probs.size(); ++i, ++k) {
      b.observations.col(k) = p.observations[i];
      b.actions.col(k) = p.actions[i];
      b.log_probs[k] = p.log_probs[i];
      b.values[k] = p.values[i];
      b.advantages[k] = p.advantages[i];
      b.returns[k] = p.returns[i];
    }
    result.episode_returns.insert(result.episode_returns.end(), p.episode_returns.begin(),
                                  p.episode_returns.end());
  }
  return result;
}

TrainResult train(const ExperimentConfig& config, const TrainOptions& options,
                  const std::function<void(const IterationLog&)>& on_iteration) {
  config.validate();
  const PpoHyper& hyper = config.marl.ppo;
  const MlpShape shape{config.env.observation_dim(), config.marl.hidden};

  TrainResult result;
  Checkpoint& ck = result.checkpoint;
  if (options.resume_from) {
    ck = load_checkpoint(*options.resume_from);
    if (!(ck.weights.shape() == shape)) {
      throw ConfigError("resume checkpoint shape does not match the configured network");
    }
    if (ck.seed != options.seed) {
      throw ConfigError("resume checkpoint was trained with seed " + std::to_string(ck.seed));
    }
  } else {
    Rng init_rng(derive_seed(options.seed, 0xC0FFEE));
    ck.weights = PolicyWeights::initialize(shape, init_rng, config.marl.log_std_init);
    ck.seed = options.seed;
  }

  auto save = [&](const std::string& name) {
    if (options.checkpoint_dir) save_checkpoint(*options.checkpoint_dir / name, ck);
  };

  for (int it = static_cast<int>(ck.iteration) + 1; it <= options.iterations; ++it) {
    const std::uint64_t iter_seed = derive_seed(options.seed, static_cast<std::uint64_t>(it));
    RolloutResult rollout = collect_rollouts(config.env, ck.weights, hyper, iter_seed,
                                             config.marl.num_envs, hyper.batch_steps, options.workers);
    Rng update_rng(derive_seed(iter_seed, 0xB10C));
    UpdateDiagnostics diag;
    try {
      diag = ppo_update(rollout.batch, ck.weights, ck.adam, hyper, update_rng);
    } catch (const TrainingError&) {
      save("last_good.ckpt");
      throw;
    }
    ck.iteration = static_cast<std::uint64_t>(it);

    IterationLog row;
    row.iteration = it;
    row.env_steps = rollout.env_steps;
    row.episodes = static_cast<int>(rollout.episode_returns.size());
    row.mean_return =
        row.episodes > 0 ? std::accumulate(rollout.episode_returns.begin(), rollout.episode_returns.end(), 0.0) /
                               row.episodes
                         : std::nan("");
    row.policy_loss = diag.policy_loss;
    row.value_loss = diag.value_loss;
    row.entropy = diag.entropy;
    row.approx_kl = diag.approx_kl;
    row.clip_fraction = diag.clip_fraction;
    result.log.push_back(row);
    if (on_iteration) on_iteration(row);

    if (it % config.marl.checkpoint_every == 0) save(iteration_file(it));
  }
  save("latest.ckpt");
  return result;
}

void write_iteration_csv_header(std::ostream& out) {
  out << "iteration,env_steps,episodes,mean_return,policy_loss,value_loss,entropy,approx_kl,"
         "clip_fraction\n";
}

void write_iteration_csv_row(std::ostream& out, const IterationLog& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%lld,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.iteration,
                static_cast<long long>(r.env_steps), r.episodes, r.mean_return, r.policy_loss,
                r.value_loss, r.entropy, r.approx_kl, r.clip_fraction);
  out << buf;
}

}  // namespace jcas
