// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   jcas_acceptance            all criteria
//   jcas_acceptance 4 8        selected criteria only

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "jcas/energy_carbon.hpp"
#include "jcas/env.hpp"
#include "jcas/evaluation.hpp"
#include "jcas/knowledge_net.hpp"
#include "jcas/phy_jcas.hpp"
#include "jcas/ppo.hpp"
#include "jcas/training.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace jcas;
namespace fs = std::filesystem;

namespace {

// Each check appends human-readable failure notes; an empty list is a pass.
struct Outcome {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    notes.emplace_back(buf);
  }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

// ---------------------------------------------------------------- 1
void physics_golden(Outcome& o) {
  const JcasParams p;
  const double doubling = -40.0 * std::log10(2.0);
  for (double r : {10.0, 50.0, 100.0, 150.0, 600.0}) {
    const double d = linear_to_db(echo_power_w(2 * r, p)) - linear_to_db(echo_power_w(r, p));
    o.require(std::abs(d - doubling) < 1e-9, fmt("R^4 doubling at %g m off by %.3g dB", r, d - doubling));
  }
  o.require(detection_probability(0.0, p) == 0.5, "logistic p(0) != 0.5");
  o.require(decode_action({0.0, -1.0}, p).pilot_density == 0.01, "pilot map u=-1 != 0.01");
  o.require(decode_action({0.0, 1.0}, p).pilot_density == 0.30, "pilot map u=+1 != 0.30");
  const CarbonSplit c = carbon_emission_kg(0.30, 0.25, EnergyParams{});
  o.require(std::abs(c.grid_kwh - 0.27) < 1e-12, fmt("grid kWh %.15g", c.grid_kwh));
  o.require(std::abs(c.co2_kg - 0.0675) < 1e-12, fmt("CO2 kg %.15g", c.co2_kg));
  o.note("doubling step %.10f dB, CO2 %.6f kg", doubling, c.co2_kg);
}

// ---------------------------------------------------------------- 2
void consensus_oracle(Outcome& o) {
  Rng rng(0xC0);
  int mismatches = 0, non_idempotent = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_index(20));
    const int t = 1 + static_cast<int>(rng.uniform_index(11));
    const CommGraph g = testing::random_graph(rng, n);
    const KnowledgeMatrix k = testing::random_knowledge(rng, n, t);
    const KnowledgeMatrix out = propagate(k, g);
    mismatches += !(out == testing::component_or(k, g));
    non_idempotent += !(propagate(out, g) == out);
  }
  o.require(mismatches == 0, fmt("%g graphs disagree with the BFS oracle", mismatches));
  o.require(non_idempotent == 0, fmt("%g graphs not idempotent", non_idempotent));
  o.note("500 graphs, N <= 20");
}

// ---------------------------------------------------------------- 3
void reward_ledger(Outcome& o) {
  EnvConfig cfg;
  cfg.n_uavs = 6;
  cfg.n_targets = 5;
  Environment env(cfg);
  Rng rng(0x1ED6E7);
  int steps = 0, episodes = 0, ledger_errors = 0, repeat_fires = 0, telescope_errors = 0;
  double worst_ledger = 0.0, worst_telescope = 0.0;
  while (steps < 1000) {
    env.reset(derive_seed(0xACCE, static_cast<std::uint64_t>(episodes++)));
    std::vector<int> det(5, 0), inf(5, 0);
    int completions = 0;
    const double phi0 = env.potential();
    double shaping = 0.0;
    while (!env.finished()) {
      std::vector<ActionVector> a(6);
      for (ActionVector& v : a) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const StepResult r = env.step(a);
      ++steps;
      const RewardTerms& t = r.transition.terms;
      const double sum = t.detection + t.inform + t.completion + t.coverage + t.energy + t.carbon +
                         t.carbon_shaping + t.revisit + t.truncation + t.throughput + t.spread + t.potential;
      worst_ledger = std::max(worst_ledger, std::abs(sum - r.reward));
      ledger_errors += std::abs(sum - r.reward) > 1e-9;
      for (int j : r.transition.newly_detected) ++det[static_cast<std::size_t>(j)];
      for (int j : r.transition.newly_informed) ++inf[static_cast<std::size_t>(j)];
      completions += t.completion != 0.0;
      shaping += t.potential;
    }
    for (int j = 0; j < 5; ++j) repeat_fires += (det[static_cast<std::size_t>(j)] > 1) + (inf[static_cast<std::size_t>(j)] > 1);
    repeat_fires += completions > 1;
    const double tel = std::abs(shaping - (env.potential() - phi0));
    worst_telescope = std::max(worst_telescope, tel);
    telescope_errors += tel > 1e-9;
  }
  o.require(ledger_errors == 0, fmt("%g steps with ledger error, worst %.3g", ledger_errors, worst_ledger));
  o.require(repeat_fires == 0, fmt("%g sparse rewards fired more than once", repeat_fires));
  o.require(telescope_errors == 0, fmt("%g episodes fail telescoping, worst %.3g", telescope_errors, worst_telescope));
  o.note("%d steps over %d episodes, worst ledger %.2e, worst telescope %.2e", steps, episodes, worst_ledger,
         worst_telescope);
}

// ---------------------------------------------------------------- 4
void cli_determinism(Outcome& o) {
#ifndef JCAS_SIM_PATH
  o.require(false, "built without the jcas_sim tool");
#else
  testing::TempDir dir("accept4");
  auto run = [&](const std::string& tag) {
    const fs::path traces = dir / ("traces_" + tag);
    const std::string cmd = std::string("\"") + JCAS_SIM_PATH + "\" eval --seed 7 --episodes 20 --out \"" +
                            (dir / (tag + ".csv")).string() + "\" --trace-dir \"" + traces.string() + "\"";
    return std::system(cmd.c_str());
  };
  o.require(run("a") == 0, "first eval run failed");
  o.require(run("b") == 0, "second eval run failed");
  const std::string csv_a = testing::slurp(dir / "a.csv");
  o.require(!csv_a.empty(), "empty metrics CSV");
  o.require(csv_a == testing::slurp(dir / "b.csv"), "metrics CSV differs between runs");
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir / "traces_a")) names.insert(e.path().filename().string());
  int compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "traces_b")) {
    const std::string name = e.path().filename().string();
    o.require(names.count(name) == 1, "trace " + name + " only in second run");
    o.require(testing::slurp(e.path()) == testing::slurp(dir / "traces_a" / name), "trace " + name + " differs");
    ++compared;
  }
  o.require(compared == 20 && names.size() == 20, fmt("expected 20 traces, got %g and %g", compared,
                                                      static_cast<double>(names.size())));
  o.note("CSV and %d traces byte-identical", compared);
#endif
}

SweepRow evaluate(PolicyKind kind, const ExperimentConfig& base, int n_uavs, int n_targets, int episodes,
                  std::uint64_t seed) {
  SweepSpec spec;
  spec.policies = {kind};
  spec.n_uavs = {n_uavs};
  spec.n_targets = {n_targets};
  spec.episodes = episodes;
  spec.seed = seed;
  return evaluate_sweep(base, spec).front();
}

constexpr std::uint64_t kTrendSeed = 2024;

// ---------------------------------------------------------------- 5
void fleet_trends(Outcome& o) {
  const ExperimentConfig base;
  std::vector<SweepRow> rows;
  for (int n : {5, 10, 15}) rows.push_back(evaluate(PolicyKind::AdaptivePilot, base, n, 3, 100, kTrendSeed));
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const MetricSummary a = rows[i].success, b = rows[i + 1].success;
    const double tolerance = std::max(a.se, b.se);
    o.require(b.mean >= a.mean - tolerance,
              fmt("success drops from %.3f", a.mean, 0) + fmt(" to %.3f beyond one SE", b.mean));
  }
  o.require(rows[2].mission_time.mean < rows[0].mission_time.mean,
            fmt("mission time N=15 %.2f not below N=5 %.2f", rows[2].mission_time.mean, rows[0].mission_time.mean));
  for (const SweepRow& r : rows) {
    o.note("N=%-2d success %.2f +- %.3f  mission time %.2f", r.n_uavs, r.success.mean, r.success.se,
           r.mission_time.mean);
  }
}

// ---------------------------------------------------------------- 6
void energy_sublinear(Outcome& o) {
  const ExperimentConfig base;
  const SweepRow n5 = evaluate(PolicyKind::AdaptivePilot, base, 5, 3, 100, kTrendSeed);
  const SweepRow n20 = evaluate(PolicyKind::AdaptivePilot, base, 20, 3, 100, kTrendSeed);
  const double ratio = n20.energy_kwh.mean / n5.energy_kwh.mean;
  o.require(ratio < 4.0, fmt("energy ratio N=20/N=5 is %.3f", ratio));
  o.note("energy N=5 %.4f kWh, N=20 %.4f kWh, ratio %.3f", n5.energy_kwh.mean, n20.energy_kwh.mean, ratio);
}

// ---------------------------------------------------------------- 7
void pilot_gap(Outcome& o) {
  const ExperimentConfig base;
  for (int n : {10, 15}) {
    const SweepRow a = evaluate(PolicyKind::AdaptivePilot, base, n, 3, 100, kTrendSeed);
    const SweepRow c = evaluate(PolicyKind::ConstantPilot, base, n, 3, 100, kTrendSeed);
    const double gap = a.throughput.mean - c.throughput.mean;
    const double se = std::hypot(a.throughput.se, c.throughput.se);
    o.require(gap > se, fmt("N=%g throughput gap not above one SE", n) + fmt(" (gap %.4f, se %.4f)", gap, se));
    o.note("N=%-2d adaptive %.4f constant %.4f gap %.4f se %.4f", n, a.throughput.mean, c.throughput.mean, gap, se);
  }
}

// ---------------------------------------------------------------- 8
void ppo_sanity(Outcome& o) {
  // Gradients, every parameter of small nets and a sample of the 512-256-128 one.
  double worst = 0.0;
  std::uint64_t seed = 1;
  for (const MlpShape& s : std::vector<MlpShape>{{3, {4}}, {31, {16, 8, 12}}, {31, {64, 64, 64}}}) {
    worst = std::max(worst, testing::worst_gradient_error(s, seed++, 6, testing::every_index(s)));
  }
  Rng pick(3);
  const MlpShape wide{31, {512, 256, 128}};
  worst = std::max(worst, testing::worst_gradient_error(wide, 99, 4, testing::sampled_indices(wide, pick, 300)));
  o.require(worst < 1e-4, fmt("gradient relative error %.3g", worst));

  Rng rng(8);
  double gae_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(50);
    std::vector<double> r(n), v(n + 1);
    std::vector<std::uint8_t> d(n);
    for (std::size_t t = 0; t < n; ++t) {
      r[t] = rng.normal();
      d[t] = rng.bernoulli(0.1);
    }
    for (double& x : v) x = rng.normal();
    const GaeResult g = compute_gae(r, v, d, 0.95, 0.95);
    const std::vector<double> ref = testing::gae_forward_oracle(r, v, d, 0.95, 0.95);
    for (std::size_t t = 0; t < n; ++t) gae_err = std::max(gae_err, std::abs(g.advantages[t] - ref[t]));
  }
  o.require(gae_err < 1e-9, fmt("GAE deviates from the oracle by %.3g", gae_err));
  o.note("worst gradient rel err %.2e, worst GAE err %.2e", worst, gae_err);

  // Desk-scale training run.
  ExperimentConfig cfg;
  cfg.env.grid.width_cells = 8;
  cfg.env.grid.height_cells = 8;
  cfg.env.n_uavs = 5;
  cfg.env.n_targets = 3;
  cfg.marl.hidden = {64, 64, 64};
  testing::TempDir dir("accept8");
  TrainOptions opt;
  opt.iterations = 40;
  opt.seed = 40;
  opt.checkpoint_dir = dir.path();
  train(cfg, opt, [&](const IterationLog& l) {
    if (l.iteration % 10 == 0 || l.iteration == 1) {
      std::printf("    iter %2d  mean return %8.3f  kl %.4f  clip %.3f\n", l.iteration, l.mean_return, l.approx_kl,
                  l.clip_fraction);
      std::fflush(stdout);
    }
  });
  cfg.evaluation.checkpoint = (dir / "latest.ckpt").string();

  auto returns = [&](PolicyKind kind) {
    const auto policy = make_policy(kind, cfg, cfg.env);
    const auto eps = run_episodes(cfg.env, *policy, 0xE7A1, 100, 1);
    std::vector<double> r;
    for (const EpisodeMetrics& m : eps) r.push_back(m.episode_return);
    return summarize(r);
  };
  const MetricSummary ppo = returns(PolicyKind::Checkpoint);
  const MetricSummary rnd = returns(PolicyKind::Random);
  const double z = 1.959963984540054;
  const double ppo_lo = ppo.mean - z * ppo.se;
  const double rnd_hi = rnd.mean + z * rnd.se;
  o.require(ppo_lo > rnd_hi, fmt("trained CI lower %.3f", ppo_lo) + fmt(" not above random CI upper %.3f", rnd_hi));
  o.note("trained return %.3f [%.3f, %.3f]", ppo.mean, ppo_lo, ppo.mean + z * ppo.se);
  o.note("random  return %.3f [%.3f, %.3f]", rnd.mean, rnd.mean - z * rnd.se, rnd_hi);
}

// ---------------------------------------------------------------- 9
void unwinnable_guard(Outcome& o) {
  ExperimentConfig base;
  base.env.n_uavs = 2;
  double worst = 0.0;
  for (PolicyKind k : {PolicyKind::Random, PolicyKind::ConstantPilot, PolicyKind::AdaptivePilot}) {
    for (int m : {1, 7, 100}) {
      const SweepRow r = evaluate(k, base, 2, 3, m, static_cast<std::uint64_t>(m));
      worst = std::max(worst, r.success.mean);
    }
  }
  o.require(worst == 0.0, fmt("success rate %.3f with theta 3 and N 2", worst));
  o.note("3 policies x M in {1, 7, 100}: success 0");
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // <= 0: no runtime bound
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "physics golden suite", 1.0, physics_golden},
      {2, "consensus oracle equivalence", 5.0, consensus_oracle},
      {3, "reward ledger conservation", 10.0, reward_ledger},
      {4, "eval determinism (CSV + traces)", 30.0, cli_determinism},
      {5, "fleet-size trends", 0.0, fleet_trends},
      {6, "energy sublinearity", 0.0, energy_sublinear},
      {7, "pilot-adaptivity throughput gap", 0.0, pilot_gap},
      {8, "PPO sanity", 0.0, ppo_sanity},
      {9, "unwinnable-config guard", 0.0, unwinnable_guard},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      o.failures.push_back(fmt("took %.2f s, budget %.0f s", secs, c.budget_s));
    }
    const bool ok = o.failures.empty();
    failed += !ok;
    std::printf("%s  criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const std::string& n : o.notes) std::printf("    %s\n", n.c_str());
    for (const std::string& f : o.failures) std::printf("    !! %s\n", f.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
