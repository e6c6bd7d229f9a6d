#pragma once

#include <utility>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

/// How one sampled mask is laid out across the batch.
enum class MaskSharing {
  kPerSample,  // independent Bernoulli pattern for every sample row
  kSharedRow,  // one pattern broadcast to the whole batch
};

/// Binary keep-masks for the hidden layers of one network, one column per
/// batch sample, plus the inverted-dropout scale 1/(1-p). Immutable once
/// sampled.
class DropoutMask {
 public:
  DropoutMask() = default;
  DropoutMask(std::vector<MatrixXd> layers, double drop_probability)
      : layers_(std::move(layers)),
        drop_probability_(drop_probability),
        scale_(1.0 / (1.0 - drop_probability)) {}

  double drop_probability() const { return drop_probability_; }
  double scale() const { return scale_; }
  /// One entry per hidden layer; an empty matrix marks an unmasked layer.
  const std::vector<MatrixXd>& layers() const { return layers_; }
  Index batch_size() const {
    for (const auto& m : layers_) {
      if (m.size() != 0) return m.cols();
    }
    return 0;
  }
  bool keep(int layer, Index sample, Index unit) const {
    return layers_[layer](unit, sample) != 0.0;
  }
  HiddenMasks hidden() const { return {layers_, scale_}; }

  bool operator==(const DropoutMask& other) const {
    if (drop_probability_ != other.drop_probability_ ||
        layers_.size() != other.layers_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (layers_[i].rows() != other.layers_[i].rows() ||
          layers_[i].cols() != other.layers_[i].cols() ||
          layers_[i] != other.layers_[i]) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<MatrixXd> layers_;
  double drop_probability_ = 0.0;
  double scale_ = 1.0;
};

/// Samples keep-masks with entries ~ Bernoulli(1 - p) for each hidden layer
/// listed in `masked_layers` (all hidden layers when empty). The batch of
/// ones is pushed through a dropout draw, so every sample gets its own row
/// unless `sharing` is kSharedRow.
inline DropoutMask sample_mask(Index batch, const std::vector<int>& hidden_widths,
                               double p, Rng& rng,
                               const std::vector<int>& masked_layers = {},
                               MaskSharing sharing = MaskSharing::kPerSample) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("drop probability must lie in [0, 1)");
  }
  if (batch <= 0) throw ConfigError("mask batch must be positive");
  std::vector<bool> selected(hidden_widths.size(), masked_layers.empty());
  for (int l : masked_layers) {
    if (l < 0 || l >= int(hidden_widths.size())) {
      throw ConfigError("masked layer index out of range");
    }
    selected[l] = true;
  }
  std::vector<MatrixXd> layers(hidden_widths.size());
  for (std::size_t l = 0; l < hidden_widths.size(); ++l) {
    if (!selected[l]) continue;
    MatrixXd m = MatrixXd::Ones(hidden_widths[l], batch);
    if (p > 0.0) {
      const Index cols = sharing == MaskSharing::kSharedRow ? 1 : batch;
      for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < m.rows(); ++r) {
          if (rng.canonical() < p) m(r, c) = 0.0;
        }
      }
      if (sharing == MaskSharing::kSharedRow) {
        for (Index c = 1; c < batch; ++c) m.col(c) = m.col(0);
      }
    }
    layers[l] = std::move(m);
  }
  return DropoutMask(std::move(layers), p);
}

/// Hidden widths of a network: widths()[1 .. L-1].
inline std::vector<int> hidden_widths(const MlpParams& net) {
  const auto& w = net.widths();
  return {w.begin() + 1, w.end() - 1};
}

/// Forward pass with every masked hidden activation replaced by
/// scale * (m .* x). The output layer is never masked.
inline MatrixXd masked_forward(const MlpParams& net, const MatrixXd& input,
                               const DropoutMask& mask,
                               ForwardCache* cache = nullptr) {
  if (mask.layers().size() != std::size_t(net.num_layers() - 1)) {
    throw ConfigError("mask layer count does not match network");
  }
  if (mask.batch_size() != 0 && mask.batch_size() != input.cols()) {
    throw ConfigError("mask batch size does not match input batch");
  }
  return forward_batch(net, input, mask.hidden(), cache);
}

struct PairOutputs {
  MatrixXd online;
  MatrixXd target;
  const DropoutMask* mask = nullptr;  // the single mask both passes used
};

/// Online and target forwards under one mask, with no resampling between
/// the two passes.
inline PairOutputs consistent_pair_forward(const MlpParams& online,
                                           const MlpParams& target,
                                           const MatrixXd& online_input,
                                           const MatrixXd& target_input,
                                           const DropoutMask& mask,
                                           ForwardCache* online_cache = nullptr) {
  if (!online.same_architecture(target)) {
    throw ConfigError("online and target critics differ in architecture");
  }
  PairOutputs out;
  out.online = masked_forward(online, online_input, mask, online_cache);
  out.target = masked_forward(target, target_input, mask);
  out.mask = &mask;
  return out;
}

}  // namespace mepg
