#include "jcas/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jcas/errors.hpp"

namespace jcas {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

}  // namespace

std::size_t MlpShape::parameter_count() const {
  std::size_t n = 0;
  int prev = input_dim;
  for (int h : hidden) {
    n += static_cast<std::size_t>(h) * static_cast<std::size_t>(prev) + static_cast<std::size_t>(h);
    prev = h;
  }
  n += static_cast<std::size_t>(kActionDim) * static_cast<std::size_t>(prev) + kActionDim;
  n += kActionDim;
  n += static_cast<std::size_t>(prev) + 1;
  return n;
}

void MlpShape::validate() const {
  if (input_dim < 1) throw ConfigError("MlpShape: input_dim must be >= 1");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("MlpShape: hidden widths must be >= 1");
  }
}

PolicyWeights::PolicyWeights(MlpShape shape) : shape_(std::move(shape)) {
  shape_.validate();
  params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(shape_.parameter_count()));
  compute_offsets();
}

int PolicyWeights::in_dim(int layer) const {
  return layer == 0 ? shape_.input_dim : shape_.hidden[static_cast<std::size_t>(layer - 1)];
}

void PolicyWeights::compute_offsets() {
  std::size_t off = 0;
  trunk_w_off_.clear();
  trunk_b_off_.clear();
  for (int l = 0; l < layers(); ++l) {
    const auto out = static_cast<std::size_t>(shape_.hidden[static_cast<std::size_t>(l)]);
    trunk_w_off_.push_back(off);
    off += out * static_cast<std::size_t>(in_dim(l));
    trunk_b_off_.push_back(off);
    off += out;
  }
  const auto last = static_cast<std::size_t>(in_dim(layers()));
  mean_w_off_ = off;
  off += kActionDim * last;
  mean_b_off_ = off;
  off += kActionDim;
  log_std_off_ = off;
  off += kActionDim;
  value_w_off_ = off;
  off += last;
  value_b_off_ = off;
}

PolicyWeights PolicyWeights::initialize(const MlpShape& shape, Rng& rng, double log_std_init) {
  PolicyWeights w(shape);
  for (int l = 0; l < w.layers(); ++l) {
    auto W = w.trunk_weight(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(W.rows() + W.cols()));
    for (Eigen::Index k = 0; k < W.size(); ++k) W.data()[k] = rng.uniform(-limit, limit);
  }
  auto M = w.mean_weight();
  for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = rng.uniform(-0.01, 0.01);
  auto V = w.value_weight();
  const double vlim = std::sqrt(6.0 / static_cast<double>(V.rows() + V.cols()));
  for (Eigen::Index k = 0; k < V.size(); ++k) V.data()[k] = rng.uniform(-vlim, vlim);
  w.log_std_param().setConstant(log_std_init);
  return w;
}

PolicyWeights::ConstMatMap PolicyWeights::trunk_weight(int layer) const {
  return {params_.data() + trunk_weight_offset(layer), shape_.hidden[static_cast<std::size_t>(layer)],
          in_dim(layer)};
}
PolicyWeights::ConstVecMap PolicyWeights::trunk_bias(int layer) const {
  return {params_.data() + trunk_bias_offset(layer), shape_.hidden[static_cast<std::size_t>(layer)]};
}
PolicyWeights::ConstMatMap PolicyWeights::mean_weight() const {
  return {params_.data() + mean_w_off_, kActionDim, in_dim(layers())};
}
PolicyWeights::ConstVecMap PolicyWeights::mean_bias() const {
  return {params_.data() + mean_b_off_, kActionDim};
}
PolicyWeights::ConstVecMap PolicyWeights::log_std_param() const {
  return {params_.data() + log_std_off_, kActionDim};
}
PolicyWeights::ConstMatMap PolicyWeights::value_weight() const {
  return {params_.data() + value_w_off_, 1, in_dim(layers())};
}
double PolicyWeights::value_bias() const { return params_[static_cast<Eigen::Index>(value_b_off_)]; }

PolicyWeights::MatMap PolicyWeights::trunk_weight(int layer) {
  return {params_.data() + trunk_weight_offset(layer), shape_.hidden[static_cast<std::size_t>(layer)],
          in_dim(layer)};
}
PolicyWeights::VecMap PolicyWeights::trunk_bias(int layer) {
  return {params_.data() + trunk_bias_offset(layer), shape_.hidden[static_cast<std::size_t>(layer)]};
}
PolicyWeights::MatMap PolicyWeights::mean_weight() {
  return {params_.data() + mean_w_off_, kActionDim, in_dim(layers())};
}
PolicyWeights::VecMap PolicyWeights::mean_bias() { return {params_.data() + mean_b_off_, kActionDim}; }
PolicyWeights::VecMap PolicyWeights::log_std_param() {
  return {params_.data() + log_std_off_, kActionDim};
}
PolicyWeights::MatMap PolicyWeights::value_weight() {
  return {params_.data() + value_w_off_, 1, in_dim(layers())};
}

Eigen::Vector2d PolicyWeights::log_std() const {
  return log_std_param().cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

PolicyOutput mlp_forward(std::span<const double> observation, const PolicyWeights& weights) {
  if (static_cast<int>(observation.size()) != weights.shape().input_dim) {
    throw ConfigError("mlp_forward: observation has " + std::to_string(observation.size()) +
                      " entries, network expects " + std::to_string(weights.shape().input_dim));
  }
  Eigen::VectorXd a =
      Eigen::Map<const Eigen::VectorXd>(observation.data(), static_cast<Eigen::Index>(observation.size()));
  for (int l = 0; l < weights.layers(); ++l) {
    a = (weights.trunk_weight(l) * a + weights.trunk_bias(l)).array().tanh().matrix();
  }
  PolicyOutput out;
  out.mean = weights.mean_weight() * a + weights.mean_bias();
  out.log_std = weights.log_std();
  out.value = (weights.value_weight() * a)(0) + weights.value_bias();
  return out;
}

BatchForward forward_batch(const Eigen::MatrixXd& observations, const PolicyWeights& weights) {
  if (observations.rows() != weights.shape().input_dim) {
    throw ConfigError("forward_batch: observation rows do not match the network input");
  }
  BatchForward f;
  f.activations.reserve(static_cast<std::size_t>(weights.layers()) + 1);
  f.activations.push_back(observations);
  for (int l = 0; l < weights.layers(); ++l) {
    Eigen::MatrixXd z = weights.trunk_weight(l) * f.activations.back();
    z.colwise() += weights.trunk_bias(l);
    f.activations.push_back(z.array().tanh().matrix());
  }
  const Eigen::MatrixXd& last = f.activations.back();
  f.mean = weights.mean_weight() * last;
  f.mean.colwise() += weights.mean_bias();
  f.value = (weights.value_weight() * last).array() + weights.value_bias();
  return f;
}

Eigen::VectorXd backward_batch(const BatchForward& f, const PolicyWeights& weights,
                               const Eigen::MatrixXd& d_mean, const Eigen::Vector2d& d_log_std,
                               const Eigen::RowVectorXd& d_value) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(weights.params().size());
  auto block = [&](std::size_t offset, Eigen::Index rows, Eigen::Index cols) {
    return Eigen::Map<Eigen::MatrixXd>(grad.data() + offset, rows, cols);
  };

  const Eigen::MatrixXd& last = f.activations.back();
  const Eigen::Index h_last = last.rows();

  block(weights.mean_weight_offset(), kActionDim, h_last) = d_mean * last.transpose();
  block(weights.mean_bias_offset(), kActionDim, 1) = d_mean.rowwise().sum();
  block(weights.value_weight_offset(), 1, h_last) = d_value * last.transpose();
  grad[static_cast<Eigen::Index>(weights.value_bias_offset())] = d_value.sum();

  const auto raw = weights.log_std_param();
  for (int k = 0; k < kActionDim; ++k) {
    const bool inside = raw[k] > kLogStdMin && raw[k] < kLogStdMax;
    grad[static_cast<Eigen::Index>(weights.log_std_offset()) + k] = inside ? d_log_std[k] : 0.0;
  }

  // Back through the trunk.
  Eigen::MatrixXd d_act = weights.mean_weight().transpose() * d_mean +
                          weights.value_weight().transpose() * d_value;
  for (int l = weights.layers() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& out = f.activations[static_cast<std::size_t>(l) + 1];
    const Eigen::MatrixXd& in = f.activations[static_cast<std::size_t>(l)];
    const Eigen::MatrixXd d_z = d_act.array() * (1.0 - out.array().square());
    block(weights.trunk_weight_offset(l), out.rows(), in.rows()) = d_z * in.transpose();
    block(weights.trunk_bias_offset(l), out.rows(), 1) = d_z.rowwise().sum();
    if (l > 0) d_act = weights.trunk_weight(l).transpose() * d_z;
  }
  return grad;
}

double gaussian_log_prob(const Eigen::Vector2d& action, const Eigen::Vector2d& mean,
                         const Eigen::Vector2d& log_std) {
  double lp = 0.0;
  for (int k = 0; k < kActionDim; ++k) {
    const double z = (action[k] - mean[k]) / std::exp(log_std[k]);
    lp += -0.5 * z * z - log_std[k] - kHalfLog2Pi;
  }
  return lp;
}

double gaussian_entropy(const Eigen::Vector2d& log_std) {
  return log_std.sum() + kActionDim * (0.5 + kHalfLog2Pi);
}

SampledAction sample_action(const PolicyOutput& output, Rng& rng) {
  SampledAction s;
  for (int k = 0; k < kActionDim; ++k) {
    s.raw[k] = output.mean[k] + std::exp(output.log_std[k]) * rng.normal();
  }
  s.log_prob = gaussian_log_prob(s.raw, output.mean, output.log_std);
  s.action = ActionVector{std::clamp(s.raw[0], -1.0, 1.0), std::clamp(s.raw[1], -1.0, 1.0)};
  return s;
}

}  // namespace jcas
