#pragma once

#include <cmath>

#include "mepg/common/error.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment accumulators for one flat parameter vector.
class AdamState {
 public:
  AdamState() = default;
  AdamState(Index size, AdamConfig config) : config_(config) {
    if (!(config.learning_rate > 0.0) || config.beta1 < 0.0 ||
        config.beta1 >= 1.0 || config.beta2 < 0.0 || config.beta2 >= 1.0 ||
        !(config.epsilon > 0.0)) {
      throw ConfigError("invalid Adam hyper-parameters");
    }
    first_ = VectorXd::Zero(size);
    second_ = VectorXd::Zero(size);
  }
  AdamState(const MlpParams& net, AdamConfig config)
      : AdamState(net.flat().size(), config) {}

  /// In-place bias-corrected Adam step: params -= lr * m_hat / (sqrt(v_hat) + eps).
  void step(Eigen::Ref<VectorXd> params, const Eigen::Ref<const VectorXd>& grads) {
    if (params.size() != first_.size() || grads.size() != first_.size()) {
      throw ConfigError("Adam state, parameters and gradients differ in size");
    }
    ++steps_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    first_ = b1 * first_ + (1.0 - b1) * grads;
    second_ = b2 * second_ + (1.0 - b2) * grads.cwiseProduct(grads);
    const double c1 = 1.0 - std::pow(b1, double(steps_));
    const double c2 = 1.0 - std::pow(b2, double(steps_));
    params.array() -= config_.learning_rate * (first_.array() / c1) /
                      ((second_.array() / c2).sqrt() + config_.epsilon);
  }

  const AdamConfig& config() const { return config_; }
  const VectorXd& first_moment() const { return first_; }
  const VectorXd& second_moment() const { return second_; }
  long steps() const { return steps_; }

 private:
  AdamConfig config_;
  VectorXd first_;
  VectorXd second_;
  long steps_ = 0;
};

inline void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
  if (!params.same_architecture(grads)) {
    throw ConfigError("gradient layout does not match parameters");
  }
  state.step(params.flat(), grads.flat());
}

/// target <- mix * online + (1 - mix) * target.
inline void soft_update(MlpParams& target, const MlpParams& online, double mix) {
  if (!(mix > 0.0 && mix <= 1.0)) {
    throw ConfigError("soft update coefficient must lie in (0, 1]");
  }
  if (!target.same_architecture(online)) {
    throw ConfigError("soft update between different architectures");
  }
  if (mix == 1.0) {
    target.flat() = online.flat();
    return;
  }
  target.flat() = mix * online.flat() + (1.0 - mix) * target.flat();
}

/// Total scalar count over a set of networks (targets included by listing them).
inline std::size_t parameter_count(std::initializer_list<const MlpParams*> nets) {
  std::size_t total = 0;
  for (const MlpParams* n : nets) total += n->parameter_count();
  return total;
}

inline std::size_t parameter_count(std::span<const MlpParams> nets) {
  std::size_t total = 0;
  for (const MlpParams& n : nets) total += n.parameter_count();
  return total;
}

/// Scalar count of an architecture without materializing it.
inline std::size_t mlp_parameter_count(const std::vector<int>& widths,
                                       OutputHead head) {
  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    total += std::size_t(widths[i + 1]) * widths[i] + widths[i + 1];
  }
  if (head == OutputHead::kGaussian) total += widths.back();
  return total;
}

}  // namespace mepg
