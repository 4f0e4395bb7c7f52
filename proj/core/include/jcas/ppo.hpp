#pragma once

// Clipped-surrogate PPO with generalised advantage estimation and Adam.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "jcas/mlp.hpp"
#include "jcas/rng.hpp"

namespace jcas {

struct PpoHyper {
  double gamma = 0.95;
  double gae_lambda = 0.95;
  double clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double learning_rate = 3e-4;
  int epochs = 10;
  int minibatch = 256;
  double max_grad_norm = 0.5;
  int batch_steps = 4096;  // environment steps per iteration

  void validate() const;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// GAE over one trajectory segment. `values` carries one extra trailing entry,
/// the bootstrap value of the state after the last step (ignored if that step
/// is terminal). dones[t] != 0 cuts the recursion after step t.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double gamma, double lambda);

/// In-place standardisation to mean 0, std 1 (std floored at 1e-8).
void normalize_advantages(std::span<double> advantages);

struct RolloutBatch {
  Eigen::MatrixXd observations;  // obs_dim x S
  Eigen::MatrixXd actions;       // 2 x S, raw Gaussian samples
  Eigen::VectorXd log_probs;
  Eigen::VectorXd values;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;

  int size() const { return static_cast<int>(log_probs.size()); }
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step = 0;
};

struct LossBreakdown {
  double policy = 0.0;   // clipped surrogate, sign such that lower is better
  double value = 0.0;    // mean squared error (before value_coef)
  double entropy = 0.0;  // per-sample Gaussian entropy
  double total = 0.0;    // policy + value_coef * value - entropy_coef * entropy
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

/// Loss over the columns in `indices` (all columns when empty) with the
/// advantages exactly as stored. Writes the parameter gradient when `grad`
/// is non-null.
LossBreakdown evaluate_loss(const RolloutBatch& batch, const PolicyWeights& weights,
                            const PpoHyper& hyper, std::span<const int> indices,
                            Eigen::VectorXd* grad);

void adam_step(PolicyWeights& weights, AdamState& state, const Eigen::VectorXd& grad,
               double learning_rate);

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  int minibatches = 0;
};

/// `epochs` passes of shuffled minibatch Adam steps. Advantages are
/// standardised over the whole batch first. On a non-finite loss or gradient
/// the weights and optimiser state are restored and TrainingError is thrown.
UpdateDiagnostics ppo_update(const RolloutBatch& batch, PolicyWeights& weights, AdamState& adam,
                             const PpoHyper& hyper, Rng& rng);

}  // namespace jcas
