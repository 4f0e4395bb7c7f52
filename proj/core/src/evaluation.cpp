#include "jcas/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "jcas/checkpoint.hpp"
#include "jcas/errors.hpp"

namespace jcas {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string trace_file_name(const std::string& prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ep%05d.jsonl", index);
  return prefix + buf;
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t base_seed, int episode_index) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(episode_index));
}

EpisodeMetrics run_episode(const EnvConfig& config, const Policy& policy, std::uint64_t seed,
                           TraceWriter* trace, int episode_index) {
  Environment env(config);
  std::vector<Observation> obs = env.reset(seed);
  Rng policy_rng(derive_seed(seed, 2));
  if (trace) trace->write_header(env, episode_index, seed);

  EpisodeMetrics m;
  std::vector<ActionVector> actions(static_cast<std::size_t>(config.n_uavs));
  double throughput_sum = 0.0;
  int steps = 0;
  while (!env.finished()) {
    for (std::size_t i = 0; i < actions.size(); ++i) actions[i] = policy.act(obs[i], policy_rng);
    StepResult r;
    try {
      r = env.step(actions);
    } catch (const ProtocolError& e) {
      throw ProtocolError("episode " + std::to_string(episode_index) + " (seed " +
                          std::to_string(seed) + "): " + e.what());
    }
    const Transition& tr = r.transition;
    if (trace) trace->write_step(tr);
    m.total_energy_kwh += std::accumulate(tr.energy_kwh.begin(), tr.energy_kwh.end(), 0.0);
    m.total_co2_kg += tr.co2_kg;
    throughput_sum += std::accumulate(tr.throughput.begin(), tr.throughput.end(), 0.0) /
                      static_cast<double>(config.n_uavs);
    m.episode_return += r.reward;
    ++steps;
    obs = std::move(r.observations);
  }
  m.success = env.done();
  m.mission_time = env.done() ? env.world().t : config.t_max;
  m.mean_norm_throughput = steps > 0 ? throughput_sum / steps : 0.0;
  for (const Hotspot& h : env.world().hotspots) m.detection_times.push_back(h.detected_at.value_or(-1));
  return m;
}

std::vector<EpisodeMetrics> run_episodes(const EnvConfig& config, const Policy& policy,
                                         std::uint64_t base_seed, int episodes, int workers,
                                         const std::optional<std::filesystem::path>& trace_dir,
                                         const std::string& trace_prefix) {
  std::vector<EpisodeMetrics> results(static_cast<std::size_t>(std::max(episodes, 0)));
  if (trace_dir) std::filesystem::create_directories(*trace_dir);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < episodes; i = next++) {
      try {
        std::optional<TraceWriter> trace;
        if (trace_dir) trace.emplace(*trace_dir / trace_file_name(trace_prefix, i));
        results[static_cast<std::size_t>(i)] =
            run_episode(config, policy, episode_seed(base_seed, i), trace ? &*trace : nullptr, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int n_threads = std::clamp(workers, 1, std::max(episodes, 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return s;
}

SweepRow aggregate(const std::string& policy, int n_uavs, int n_targets,
                   std::span<const EpisodeMetrics> episodes) {
  SweepRow row;
  row.policy = policy;
  row.n_uavs = n_uavs;
  row.n_targets = n_targets;
  row.episodes = static_cast<int>(episodes.size());
  auto column = [&](auto getter) {
    std::vector<double> v;
    v.reserve(episodes.size());
    for (const EpisodeMetrics& e : episodes) v.push_back(getter(e));
    return summarize(v);
  };
  row.success = column([](const EpisodeMetrics& e) { return e.success ? 1.0 : 0.0; });
  row.mission_time = column([](const EpisodeMetrics& e) { return static_cast<double>(e.mission_time); });
  row.energy_kwh = column([](const EpisodeMetrics& e) { return e.total_energy_kwh; });
  row.co2_kg = column([](const EpisodeMetrics& e) { return e.total_co2_kg; });
  row.throughput = column([](const EpisodeMetrics& e) { return e.mean_norm_throughput; });
  row.episode_return = column([](const EpisodeMetrics& e) { return e.episode_return; });
  return row;
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ExperimentConfig& config,
                                    const EnvConfig& env) {
  const ScriptedParams& sp = config.evaluation.scripted;
  auto sweep = [&](PilotMode mode) {
    SweepPolicyConfig c = sweep_config_for(env, mode, sp.jitter);
    c.constant_pilot = sp.constant_pilot;
    c.adaptive_high_pilot = sp.adaptive_high_pilot;
    c.adaptive_low_pilot = sp.adaptive_low_pilot;
    c.adaptive_radius_cells = sp.adaptive_radius_cells;
    return std::make_unique<SweepPolicy>(c);
  };
  switch (kind) {
    case PolicyKind::Random: return std::make_unique<RandomPolicy>();
    case PolicyKind::ConstantPilot: return sweep(PilotMode::Constant);
    case PolicyKind::AdaptivePilot: return sweep(PilotMode::Adaptive);
    case PolicyKind::Checkpoint: {
      if (config.evaluation.checkpoint.empty()) {
        throw ConfigError("checkpoint policy selected but no checkpoint path given");
      }
      Checkpoint ck = load_checkpoint(config.evaluation.checkpoint);
      if (ck.weights.shape().input_dim != env.observation_dim()) {
        throw ConfigError("checkpoint expects observations of size " +
                          std::to_string(ck.weights.shape().input_dim) + ", environment produces " +
                          std::to_string(env.observation_dim()));
      }
      return std::make_unique<MlpPolicy>(std::move(ck.weights), true);
    }
  }
  throw ConfigError("unknown policy kind");
}

std::vector<SweepRow> evaluate_sweep(const ExperimentConfig& base, const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  for (PolicyKind kind : spec.policies) {
    for (int n_uavs : spec.n_uavs) {
      for (int n_targets : spec.n_targets) {
        EnvConfig env = base.env;
        env.n_uavs = n_uavs;
        env.n_targets = n_targets;
        env.validate();
        const auto policy = make_policy(kind, base, env);
        const std::string prefix = std::string(to_string(kind)) + "_N" + std::to_string(n_uavs) +
                                   "_T" + std::to_string(n_targets) + "_";
        const auto episodes =
            run_episodes(env, *policy, spec.seed, spec.episodes, spec.workers, spec.trace_dir, prefix);
        rows.push_back(aggregate(to_string(kind), n_uavs, n_targets, episodes));
      }
    }
  }
  return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const SweepRow> rows) {
  for (std::size_t c = 0; c < kMetricsCsvColumns.size(); ++c) {
    out << (c ? "," : "") << kMetricsCsvColumns[c];
  }
  out << '\n';
  for (const SweepRow& r : rows) {
    out << r.policy << ',' << r.n_uavs << ',' << r.n_targets << ',' << r.episodes << ','
        << format_number(r.success.mean) << ',' << format_number(r.success.se) << ','
        << format_number(r.mission_time.mean) << ',' << format_number(r.energy_kwh.mean) << ','
        << format_number(r.co2_kg.mean) << ',' << format_number(r.throughput.mean) << '\n';
  }
}

}  // namespace jcas
