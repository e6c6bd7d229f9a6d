#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/common/rng.hpp"

namespace mepg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// What the last affine layer feeds into.
enum class OutputHead {
  kLinear,    // raw affine output (critics)
  kTanh,      // tanh-squashed output (deterministic actors)
  kGaussian,  // affine output is the mean; plus a state-independent log-std
};

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
using std::tanh;

/// Fully connected ReLU network. All scalars live in one contiguous vector;
/// weight(i) and bias(i) are column-major views into it, so copies are plain
/// value copies and optimizer/target updates operate on flat().
class MlpParams {
 public:
  MlpParams() = default;

  /// Zero-initialized network with layer widths [M_0, M_1, ..., M_L].
  MlpParams(std::vector<int> widths, OutputHead head)
      : widths_(std::move(widths)), head_(head) {
    if (widths_.size() < 2) {
      throw ConfigError("mlp needs at least an input and an output width");
    }
    Index offset = 0;
    for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
      if (widths_[i] <= 0 || widths_[i + 1] <= 0) {
        throw ConfigError("mlp layer widths must be positive");
      }
      weight_offset_.push_back(offset);
      offset += Index{widths_[i + 1]} * widths_[i];
      bias_offset_.push_back(offset);
      offset += widths_[i + 1];
    }
    log_std_offset_ = offset;
    if (head_ == OutputHead::kGaussian) offset += widths_.back();
    flat_ = VectorXd::Zero(offset);
  }

  /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases and
  /// log-std zero.
  static MlpParams initialized(std::vector<int> widths, OutputHead head,
                               Rng& rng) {
    MlpParams net(std::move(widths), head);
    for (int i = 0; i < net.num_layers(); ++i) {
      const double bound = 1.0 / std::sqrt(double(net.widths_[i]));
      auto w = net.weight(i);
      for (Index c = 0; c < w.cols(); ++c) {
        for (Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
      }
    }
    return net;
  }

  int num_layers() const { return int(widths_.size()) - 1; }
  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  OutputHead head() const { return head_; }

  Eigen::Map<MatrixXd> weight(int layer) {
    return {flat_.data() + weight_offset_[layer], widths_[layer + 1],
            widths_[layer]};
  }
  Eigen::Map<const MatrixXd> weight(int layer) const {
    return {flat_.data() + weight_offset_[layer], widths_[layer + 1],
            widths_[layer]};
  }
  Eigen::Map<VectorXd> bias(int layer) {
    return {flat_.data() + bias_offset_[layer], widths_[layer + 1]};
  }
  Eigen::Map<const VectorXd> bias(int layer) const {
    return {flat_.data() + bias_offset_[layer], widths_[layer + 1]};
  }
  /// Only meaningful for the Gaussian head.
  Eigen::Map<VectorXd> log_std() {
    return {flat_.data() + log_std_offset_, has_log_std() ? output_dim() : 0};
  }
  Eigen::Map<const VectorXd> log_std() const {
    return {flat_.data() + log_std_offset_, has_log_std() ? output_dim() : 0};
  }
  bool has_log_std() const { return head_ == OutputHead::kGaussian; }

  /// Flat position of weight(layer)(row, col).
  Index weight_index(int layer, Index row, Index col) const {
    return weight_offset_[layer] + col * widths_[layer + 1] + row;
  }
  Index bias_index(int layer, Index row) const {
    return bias_offset_[layer] + row;
  }
  Index log_std_index(Index j) const { return log_std_offset_ + j; }

  VectorXd& flat() { return flat_; }
  const VectorXd& flat() const { return flat_; }
  std::size_t parameter_count() const { return std::size_t(flat_.size()); }

  bool same_architecture(const MlpParams& other) const {
    return widths_ == other.widths_ && head_ == other.head_;
  }
  bool all_finite() const { return flat_.allFinite(); }

  /// Same architecture, all zeros; the natural container for gradients.
  MlpParams zeros_like() const {
    MlpParams z = *this;
    z.flat_.setZero();
    return z;
  }

 private:
  std::vector<int> widths_;
  OutputHead head_ = OutputHead::kLinear;
  std::vector<Index> weight_offset_;
  std::vector<Index> bias_offset_;
  Index log_std_offset_ = 0;
  VectorXd flat_;
};

/// Intermediate values of a batched forward pass, kept for backward().
/// Column n of every matrix belongs to sample n.
struct ForwardCache {
  std::vector<MatrixXd> layer_inputs;  // input fed to each affine layer
  MatrixXd output;                     // head output
  std::vector<double> hidden_scales;   // multiplier applied per hidden layer
};

/// Per-hidden-layer multiplicative masks used by forward_batch. masks[l]
/// applies to the activations of hidden layer l (width x batch); an empty
/// matrix leaves that layer untouched. `scale` multiplies masked layers.
struct HiddenMasks {
  std::span<const MatrixXd> masks;
  double scale = 1.0;
};

namespace internal {

inline void check_input(const MlpParams& net, Index rows) {
  if (rows != net.input_dim()) {
    throw ConfigError("mlp input has " + std::to_string(rows) +
                      " rows, network expects " +
                      std::to_string(net.input_dim()));
  }
}

}  // namespace internal

/// Batched forward: `input` is M_0 x batch. Hidden layers use ReLU; masks,
/// when given, are applied to hidden activations as scale * (m .* x).
inline MatrixXd forward_batch(const MlpParams& net, const MatrixXd& input,
                              HiddenMasks masks = {},
                              ForwardCache* cache = nullptr) {
  internal::check_input(net, input.rows());
  const int layers = net.num_layers();
  if (!masks.masks.empty() && int(masks.masks.size()) != layers - 1) {
    throw ConfigError("mask count does not match hidden layer count");
  }
  if (cache) {
    cache->layer_inputs.resize(layers);
    cache->layer_inputs[0] = input;
    cache->hidden_scales.assign(layers - 1, 1.0);
  }
  MatrixXd x = input;
  for (int i = 0; i < layers; ++i) {
    MatrixXd z(net.widths()[i + 1], x.cols());
    z.noalias() = net.weight(i) * x;
    z.colwise() += net.bias(i);
    if (i + 1 == layers) {
      x = std::move(z);
      break;
    }
    x = z.cwiseMax(0.0);
    if (!masks.masks.empty() && masks.masks[i].size() != 0) {
      const MatrixXd& m = masks.masks[i];
      if (m.rows() != x.rows() || m.cols() != x.cols()) {
        throw ConfigError("mask shape does not match hidden layer " +
                          std::to_string(i));
      }
      x = x.cwiseProduct(m) * masks.scale;
      if (cache) cache->hidden_scales[i] = masks.scale;
    }
    if (cache) cache->layer_inputs[i + 1] = x;
  }
  if (net.head() == OutputHead::kTanh) x = x.array().tanh().matrix();
  if (cache) cache->output = x;
  return x;
}

/// Single-sample forward.
inline VectorXd mlp_forward(const MlpParams& net, const VectorXd& input) {
  MatrixXd out = forward_batch(net, MatrixXd(input));
  return out.col(0);
}

/// Reverse pass for a cached forward. `d_output` is the loss gradient with
/// respect to the head output (the mean for Gaussian heads). Parameter
/// gradients are accumulated into `grads` when non-null; the gradient with
/// respect to the network input is returned.
inline MatrixXd backward_batch(const MlpParams& net, const ForwardCache& cache,
                               const MatrixXd& d_output, MlpParams* grads) {
  const int layers = net.num_layers();
  MatrixXd dz = d_output;
  if (net.head() == OutputHead::kTanh) {
    dz = dz.cwiseProduct(
        (1.0 - cache.output.array().square()).matrix());
  }
  for (int i = layers - 1; i >= 0; --i) {
    const MatrixXd& x = cache.layer_inputs[i];
    if (grads) {
      grads->weight(i).noalias() += dz * x.transpose();
      grads->bias(i) += dz.rowwise().sum();
    }
    MatrixXd dx(x.rows(), x.cols());
    dx.noalias() = net.weight(i).transpose() * dz;
    if (i == 0) return dx;
    // x = scale * m .* relu(z): the derivative is scale where x > 0, else 0.
    const double s = cache.hidden_scales[i - 1];
    dz = (x.array() > 0.0).select(dx.array() * s, 0.0).matrix();
  }
  return dz;
}

/// Scalar-generic single-sample forward over flat parameters laid out as in
/// MlpParams. Works with double and with tape variables.
template <class T>
std::vector<T> forward_generic(const MlpParams& layout,
                               std::span<const T> params,
                               std::span<const T> input,
                               std::span<const std::vector<double>> masks = {},
                               double scale = 1.0) {
  if (Index(params.size()) != layout.flat().size()) {
    throw ConfigError("parameter vector does not match network layout");
  }
  internal::check_input(layout, Index(input.size()));
  std::vector<T> x(input.begin(), input.end());
  const int layers = layout.num_layers();
  for (int i = 0; i < layers; ++i) {
    const int rows = layout.widths()[i + 1];
    std::vector<T> z;
    z.reserve(rows);
    for (int r = 0; r < rows; ++r) {
      T acc = params[layout.bias_index(i, r)];
      for (std::size_t c = 0; c < x.size(); ++c) {
        acc = acc + params[layout.weight_index(i, r, Index(c))] * x[c];
      }
      z.push_back(acc);
    }
    if (i + 1 < layers) {
      for (int r = 0; r < rows; ++r) {
        z[r] = relu(z[r]);
        if (!masks.empty() && !masks[i].empty()) z[r] = z[r] * (masks[i][r] * scale);
      }
    } else if (layout.head() == OutputHead::kTanh) {
      for (auto& v : z) v = tanh(v);
    }
    x = std::move(z);
  }
  return x;
}

}  // namespace mepg
