#include "jcas/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jcas/errors.hpp"

namespace jcas {

void PpoHyper::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("PpoHyper: gamma must lie in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) {
    throw ConfigError("PpoHyper: gae_lambda must lie in [0, 1]");
  }
  if (!(clip > 0.0)) throw ConfigError("PpoHyper: clip must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("PpoHyper: learning_rate must be > 0");
  if (epochs < 1 || minibatch < 1 || batch_steps < 1) {
    throw ConfigError("PpoHyper: epochs, minibatch and batch_steps must be >= 1");
  }
  if (!(value_coef >= 0.0 && entropy_coef >= 0.0 && max_grad_norm >= 0.0)) {
    throw ConfigError("PpoHyper: coefficients must be >= 0");
  }
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const std::uint8_t> dones, double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n + 1 || dones.size() != n) {
    throw ProtocolError("compute_gae: expected |values| = |rewards| + 1 = |dones| + 1");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double nonterminal = dones[k] ? 0.0 : 1.0;
    const double delta = rewards[k] + gamma * values[k + 1] * nonterminal - values[k];
    running = delta + gamma * lambda * nonterminal * running;
    out.advantages[k] = running;
    out.returns[k] = running + values[k];
  }
  return out;
}

void normalize_advantages(std::span<double> adv) {
  if (adv.empty()) return;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::max(std::sqrt(var / n), 1e-8);
  for (double& a : adv) a = (a - mean) / sd;
}

LossBreakdown evaluate_loss(const RolloutBatch& batch, const PolicyWeights& weights,
                            const PpoHyper& hyper, std::span<const int> indices,
                            Eigen::VectorXd* grad) {
  std::vector<int> all;
  if (indices.empty()) {
    all.resize(static_cast<std::size_t>(batch.size()));
    std::iota(all.begin(), all.end(), 0);
    indices = all;
  }
  const auto b = static_cast<Eigen::Index>(indices.size());
  const double inv_b = 1.0 / static_cast<double>(b);

  Eigen::MatrixXd obs(batch.observations.rows(), b);
  for (Eigen::Index k = 0; k < b; ++k) obs.col(k) = batch.observations.col(indices[static_cast<std::size_t>(k)]);
  const BatchForward f = forward_batch(obs, weights);
  const Eigen::Vector2d log_std = weights.log_std();
  const Eigen::Array2d inv_var = (-2.0 * log_std.array()).exp();

  Eigen::MatrixXd d_mean(kActionDim, b);
  Eigen::RowVectorXd d_value(b);
  Eigen::Vector2d d_log_std = Eigen::Vector2d::Zero();
  LossBreakdown loss;
  int clipped = 0;

  for (Eigen::Index k = 0; k < b; ++k) {
    const int s = indices[static_cast<std::size_t>(k)];
    const Eigen::Vector2d action = batch.actions.col(s);
    const Eigen::Vector2d mean = f.mean.col(k);
    const double lp = gaussian_log_prob(action, mean, log_std);
    const double log_ratio = lp - batch.log_probs[s];
    const double ratio = std::exp(log_ratio);
    const double adv = batch.advantages[s];
    const double surr1 = ratio * adv;
    const double clipped_ratio = std::clamp(ratio, 1.0 - hyper.clip, 1.0 + hyper.clip);
    const double surr2 = clipped_ratio * adv;
    loss.policy -= std::min(surr1, surr2) * inv_b;
    if (std::abs(ratio - 1.0) > hyper.clip) ++clipped;
    loss.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;

    // d(-min(surr1, surr2))/d(log_prob): zero when the clipped branch is the
    // active minimum and the ratio sits outside the trust region.
    const bool unclipped_active = surr1 <= surr2 || clipped_ratio == ratio;
    const double d_lp = unclipped_active ? -ratio * adv * inv_b : 0.0;
    const Eigen::Array2d diff = (action - mean).array();
    d_mean.col(k) = (d_lp * diff * inv_var).matrix();
    d_log_std += (d_lp * (diff.square() * inv_var - 1.0)).matrix();

    const double err = f.value[k] - batch.returns[s];
    loss.value += err * err * inv_b;
    d_value[k] = hyper.value_coef * 2.0 * err * inv_b;
  }
  loss.entropy = gaussian_entropy(log_std);
  d_log_std.array() -= hyper.entropy_coef;
  loss.total = loss.policy + hyper.value_coef * loss.value - hyper.entropy_coef * loss.entropy;
  loss.clip_fraction = static_cast<double>(clipped) * inv_b;

  if (grad) *grad = backward_batch(f, weights, d_mean, d_log_std, d_value);
  return loss;
}

void adam_step(PolicyWeights& weights, AdamState& state, const Eigen::VectorXd& grad,
               double learning_rate) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  if (state.m.size() != grad.size()) {
    state.m = Eigen::VectorXd::Zero(grad.size());
    state.v = Eigen::VectorXd::Zero(grad.size());
    state.step = 0;
  }
  ++state.step;
  state.m = kBeta1 * state.m + (1.0 - kBeta1) * grad;
  state.v = kBeta2 * state.v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
  weights.params().array() -=
      learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + kEps);
}

UpdateDiagnostics ppo_update(const RolloutBatch& batch, PolicyWeights& weights, AdamState& adam,
                             const PpoHyper& hyper, Rng& rng) {
  hyper.validate();
  RolloutBatch normalized = batch;
  normalize_advantages({normalized.advantages.data(), static_cast<std::size_t>(normalized.advantages.size())});

  const PolicyWeights backup_weights = weights;
  const AdamState backup_adam = adam;

  std::vector<int> order(static_cast<std::size_t>(batch.size()));
  std::iota(order.begin(), order.end(), 0);
  UpdateDiagnostics diag;
  Eigen::VectorXd grad;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t k = order.size(); k > 1; --k) {
      std::swap(order[k - 1], order[rng.uniform_index(k)]);
    }
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.minibatch)) {
      const std::size_t len = std::min(order.size() - start, static_cast<std::size_t>(hyper.minibatch));
      const std::span<const int> idx(order.data() + start, len);
      const LossBreakdown loss = evaluate_loss(normalized, weights, hyper, idx, &grad);
      if (!std::isfinite(loss.total) || !grad.allFinite()) {
        weights = backup_weights;
        adam = backup_adam;
        throw TrainingError("ppo_update: non-finite loss or gradient; update aborted");
      }
      const double norm = grad.norm();
      if (hyper.max_grad_norm > 0.0 && norm > hyper.max_grad_norm) grad *= hyper.max_grad_norm / norm;
      adam_step(weights, adam, grad, hyper.learning_rate);

      diag.policy_loss += loss.policy;
      diag.value_loss += loss.value;
      diag.entropy += loss.entropy;
      diag.approx_kl += loss.approx_kl;
      diag.clip_fraction += loss.clip_fraction;
      ++diag.minibatches;
    }
  }
  if (diag.minibatches > 0) {
    const double inv = 1.0 / diag.minibatches;
    diag.policy_loss *= inv;
    diag.value_loss *= inv;
    diag.entropy *= inv;
    diag.approx_kl *= inv;
    diag.clip_fraction *= inv;
  }
  return diag;
}

}  // namespace jcas
