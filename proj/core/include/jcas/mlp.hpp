#pragma once

// Shared actor-critic MLP: tanh trunk, a linear head for the two action means,
// two state-independent log-std parameters, and a linear value head.
//
// All parameters live in one contiguous vector so the optimiser, finite
// difference checks and checkpoints can treat them uniformly. The layout is
//   for each hidden layer l: W_l (out x in, column-major), b_l (out)
//   mean head: W (2 x h_last), b (2)
//   log_std (2)
//   value head: W (1 x h_last), b (1)

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "jcas/env.hpp"
#include "jcas/rng.hpp"

namespace jcas {

inline constexpr int kActionDim = 2;
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

struct MlpShape {
  int input_dim = 0;
  std::vector<int> hidden{64, 64, 64};

  std::size_t parameter_count() const;
  void validate() const;
  bool operator==(const MlpShape&) const = default;
};

class PolicyWeights {
 public:
  PolicyWeights() = default;
  // All-zero parameters.
  explicit PolicyWeights(MlpShape shape);

  /// Scaled-uniform (Glorot) trunk, near-zero mean head, log_std = log_std_init.
  static PolicyWeights initialize(const MlpShape& shape, Rng& rng, double log_std_init = 0.0);

  const MlpShape& shape() const { return shape_; }
  int layers() const { return static_cast<int>(shape_.hidden.size()); }
  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  ConstMatMap trunk_weight(int layer) const;
  ConstVecMap trunk_bias(int layer) const;
  ConstMatMap mean_weight() const;
  ConstVecMap mean_bias() const;
  ConstVecMap log_std_param() const;
  ConstMatMap value_weight() const;
  double value_bias() const;

  MatMap trunk_weight(int layer);
  VecMap trunk_bias(int layer);
  MatMap mean_weight();
  VecMap mean_bias();
  VecMap log_std_param();
  MatMap value_weight();

  // Offsets into params(); used by the backward pass.
  std::size_t trunk_weight_offset(int layer) const { return trunk_w_off_[static_cast<std::size_t>(layer)]; }
  std::size_t trunk_bias_offset(int layer) const { return trunk_b_off_[static_cast<std::size_t>(layer)]; }
  std::size_t mean_weight_offset() const { return mean_w_off_; }
  std::size_t mean_bias_offset() const { return mean_b_off_; }
  std::size_t log_std_offset() const { return log_std_off_; }
  std::size_t value_weight_offset() const { return value_w_off_; }
  std::size_t value_bias_offset() const { return value_b_off_; }

  /// log_std clamped to [kLogStdMin, kLogStdMax].
  Eigen::Vector2d log_std() const;

  bool all_finite() const { return params_.allFinite(); }

 private:
  int in_dim(int layer) const;
  void compute_offsets();

  MlpShape shape_;
  Eigen::VectorXd params_;
  std::vector<std::size_t> trunk_w_off_;
  std::vector<std::size_t> trunk_b_off_;
  std::size_t mean_w_off_ = 0;
  std::size_t mean_b_off_ = 0;
  std::size_t log_std_off_ = 0;
  std::size_t value_w_off_ = 0;
  std::size_t value_b_off_ = 0;
};

struct PolicyOutput {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Vector2d log_std = Eigen::Vector2d::Zero();
  double value = 0.0;
};

/// Single observation forward pass. Throws ConfigError on a dimension mismatch.
PolicyOutput mlp_forward(std::span<const double> observation, const PolicyWeights& weights);

// Batched pass over columns of `observations` (input_dim x B). Keeps the
// activations needed by backward_batch.
struct BatchForward {
  std::vector<Eigen::MatrixXd> activations;  // [0] = input, [l+1] = tanh output of layer l
  Eigen::MatrixXd mean;                      // 2 x B
  Eigen::RowVectorXd value;                  // 1 x B
};

BatchForward forward_batch(const Eigen::MatrixXd& observations, const PolicyWeights& weights);

/// Gradient of a scalar loss with respect to every parameter, given the loss
/// gradients with respect to the batch means, the (clamped) log-std, and the
/// batch values. The log-std gradient is zeroed where the clamp is active.
Eigen::VectorXd backward_batch(const BatchForward& forward, const PolicyWeights& weights,
                               const Eigen::MatrixXd& d_mean, const Eigen::Vector2d& d_log_std,
                               const Eigen::RowVectorXd& d_value);

double gaussian_log_prob(const Eigen::Vector2d& action, const Eigen::Vector2d& mean,
                         const Eigen::Vector2d& log_std);
double gaussian_entropy(const Eigen::Vector2d& log_std);

struct SampledAction {
  Eigen::Vector2d raw = Eigen::Vector2d::Zero();  // unclipped Gaussian sample
  ActionVector action;                            // clipped to [-1, 1]^2
  double log_prob = 0.0;                          // of `raw`
};

SampledAction sample_action(const PolicyOutput& output, Rng& rng);

}  // namespace jcas
