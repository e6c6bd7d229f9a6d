#pragma once

// Loss functions of the actor-critic updates, written as pure functions of
// parameters and pre-drawn randomness (noise matrices and dropout masks) so
// that each can be re-evaluated under perturbed parameters.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "mepg/dropout/dropout.hpp"
#include "mepg/envs/env.hpp"
#include "mepg/numerics/mlp.hpp"
#include "mepg/replay/replay_buffer.hpp"

namespace mepg {

/// Affine map from the [-1, 1] squashed range to the action bounds.
struct ActionScale {
  VectorXd center;
  VectorXd half_range;
  VectorXd low;
  VectorXd high;

  explicit ActionScale(const EnvSpec& spec)
      : center(spec.action_center()),
        half_range(spec.action_half_range()),
        low(spec.action_low),
        high(spec.action_high) {}

  /// center + half_range .* squashed, column by column.
  MatrixXd to_env(const MatrixXd& squashed) const {
    return (squashed.array().colwise() * half_range.array()).colwise() +
           center.array();
  }
  MatrixXd clip(const MatrixXd& a) const {
    return a.cwiseMax(low.replicate(1, a.cols())).cwiseMin(high.replicate(1, a.cols()));
  }
};

/// Stacks states over actions: the critic input [s; a].
inline MatrixXd critic_input(const MatrixXd& states, const MatrixXd& actions) {
  MatrixXd x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

struct CriticLoss {
  double loss = 0.0;
  std::vector<MlpParams> grads;  // one per online critic
  VectorXd targets;              // Bellman targets y (held constant)
  MatrixXd target_actions;       // next-state actions fed to the target critics
  const DropoutMask* online_mask = nullptr;
  const DropoutMask* target_mask = nullptr;
};

namespace internal {

inline void check_critics(std::span<const MlpParams> critics,
                          std::span<const MlpParams> targets) {
  if (critics.empty() || critics.size() != targets.size()) {
    throw ConfigError("need matching online and target critics");
  }
  for (std::size_t k = 0; k < critics.size(); ++k) {
    if (!critics[k].same_architecture(targets[k]) ||
        !critics[k].same_architecture(critics[0])) {
      throw ConfigError("critic architectures differ");
    }
  }
}

/// Elementwise minimum over target critics of the masked target values.
/// Every online/target pair uses the same mask.
inline VectorXd min_target_q(std::span<const MlpParams> targets,
                             const MatrixXd& next_input, const DropoutMask& mask) {
  VectorXd q = masked_forward(targets[0], next_input, mask).row(0).transpose();
  for (std::size_t k = 1; k < targets.size(); ++k) {
    q = q.cwiseMin(VectorXd(masked_forward(targets[k], next_input, mask).row(0).transpose()));
  }
  return q;
}

/// Regresses each online critic onto the fixed targets y:
/// sum_k mean_n 0.5 (y_n - Q_k(s_n, a_n))^2 under `mask`.
inline void regress_critics(std::span<const MlpParams> critics, const Batch& batch,
                            const DropoutMask& mask, CriticLoss& out) {
  const MatrixXd input = critic_input(batch.states, batch.actions);
  const double n = double(batch.size());
  out.loss = 0.0;
  out.grads.clear();
  for (const MlpParams& critic : critics) {
    ForwardCache cache;
    const VectorXd q = masked_forward(critic, input, mask, &cache).row(0).transpose();
    const VectorXd diff = q - out.targets;
    out.loss += 0.5 * diff.squaredNorm() / n;
    MlpParams g = critic.zeros_like();
    backward_batch(critic, cache, (diff / n).transpose(), &g);
    out.grads.push_back(std::move(g));
  }
  out.online_mask = &mask;
}

}  // namespace internal

/// Consistent-mask TD loss of the deterministic family:
///   a~ = clip(pi'(s') + noise, bounds)
///   y  = r + g (1 - done) min_k D_m Q_k(s', a~; theta'_k)
///   L  = sum_k mean 0.5 (y - D_m Q_k(s, a; theta_k))^2
/// `target_noise` (action_dim x N) is already clipped; pass zeros to disable
/// smoothing. An all-ones mask recovers the plain TD loss.
inline CriticLoss deterministic_critic_loss(std::span<const MlpParams> critics,
                                            std::span<const MlpParams> targets,
                                            const MlpParams& actor_target,
                                            const Batch& batch,
                                            const MatrixXd& target_noise,
                                            const DropoutMask& mask,
                                            const ActionScale& scale,
                                            double discount) {
  internal::check_critics(critics, targets);
  CriticLoss out;
  const MatrixXd policy = scale.to_env(forward_batch(actor_target, batch.next_states));
  out.target_actions = scale.clip(policy + target_noise);
  const MatrixXd next_input = critic_input(batch.next_states, out.target_actions);
  const VectorXd q_next = internal::min_target_q(targets, next_input, mask);
  out.target_mask = &mask;
  out.targets = batch.rewards + discount * batch.not_terminal.cwiseProduct(q_next);
  internal::regress_critics(critics, batch, mask, out);
  return out;
}

struct ActorLoss {
  double loss = 0.0;
  MlpParams grads;
  double mean_log_prob = 0.0;  // stochastic actors only
  MatrixXd actions;
};

/// Deterministic policy gradient objective through the unmasked critic:
///   L = -mean_n Q(s_n, pi(s_n)).
inline ActorLoss deterministic_actor_loss(const MlpParams& actor,
                                          const MlpParams& critic,
                                          const Batch& batch,
                                          const ActionScale& scale) {
  ActorLoss out;
  ForwardCache actor_cache;
  const MatrixXd squashed = forward_batch(actor, batch.states, {}, &actor_cache);
  out.actions = scale.to_env(squashed);
  ForwardCache critic_cache;
  const MatrixXd q =
      forward_batch(critic, critic_input(batch.states, out.actions), {}, &critic_cache);
  const double n = double(batch.size());
  out.loss = -q.sum() / n;
  const MatrixXd d_input =
      backward_batch(critic, critic_cache, MatrixXd::Constant(1, q.cols(), -1.0 / n), nullptr);
  const MatrixXd d_action = d_input.bottomRows(actor.output_dim());
  out.grads = actor.zeros_like();
  backward_batch(actor, actor_cache,
                 (d_action.array().colwise() * scale.half_range.array()).matrix(),
                 &out.grads);
  return out;
}

/// Reparameterized draws from a tanh-squashed diagonal Gaussian policy.
struct SquashedSample {
  MatrixXd actions;   // in env units
  MatrixXd pre_tanh;  // u = mu + sigma .* eps
  MatrixXd squashed;  // tanh(u)
  MatrixXd noise;     // eps
  VectorXd log_prob;  // log density of `actions` under the policy
  VectorXd log_std;   // clamped log-std
  ForwardCache cache;
};

/// log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)), stable for large |u|.
inline double log_one_minus_tanh_sq(double u) {
  const double x = -2.0 * u;
  const double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return 2.0 * (std::numbers::ln2 - u - softplus);
}

inline VectorXd clamped_log_std(const MlpParams& actor, double lo, double hi) {
  return actor.log_std().cwiseMax(lo).cwiseMin(hi);
}

/// a = center + half .* tanh(mu(s) + sigma .* eps), with the change of
/// variables log-density including the tanh and bound-scaling Jacobians.
inline SquashedSample sample_squashed(const MlpParams& actor, const MatrixXd& states,
                                      const MatrixXd& noise, const ActionScale& scale,
                                      double log_std_min = -20.0,
                                      double log_std_max = 2.0) {
  SquashedSample s;
  const MatrixXd mean = forward_batch(actor, states, {}, &s.cache);
  if (noise.rows() != mean.rows() || noise.cols() != mean.cols()) {
    throw ConfigError("policy noise shape does not match action batch");
  }
  s.noise = noise;
  s.log_std = clamped_log_std(actor, log_std_min, log_std_max);
  const VectorXd sigma = s.log_std.array().exp();
  s.pre_tanh = mean + (noise.array().colwise() * sigma.array()).matrix();
  s.squashed = s.pre_tanh.array().tanh().matrix();
  s.actions = scale.to_env(s.squashed);
  const double per_dim_const = 0.5 * std::log(2.0 * std::numbers::pi);
  const double log_half = scale.half_range.array().log().sum();
  s.log_prob.resize(states.cols());
  for (Index n = 0; n < states.cols(); ++n) {
    double lp = 0.0;
    for (Index j = 0; j < mean.rows(); ++j) {
      const double e = noise(j, n);
      lp += -0.5 * e * e - s.log_std[j] - per_dim_const -
            log_one_minus_tanh_sq(s.pre_tanh(j, n));
    }
    s.log_prob[n] = lp - log_half;
  }
  return s;
}

/// Soft TD loss with a consistent mask:
///   a~' = sampled from pi(.|s') with `next_noise`
///   y   = r + g (1 - done) (min_k D_m Q_k(s', a~') - alpha log pi(a~'|s'))
///   L   = sum_k mean 0.5 (y - D_m Q_k(s, a))^2
/// With discount_entropy_term = false the entropy bonus sits outside g.
inline CriticLoss stochastic_critic_loss(std::span<const MlpParams> critics,
                                         std::span<const MlpParams> targets,
                                         const MlpParams& actor, const Batch& batch,
                                         const MatrixXd& next_noise,
                                         const DropoutMask& mask,
                                         const ActionScale& scale, double discount,
                                         double alpha, bool discount_entropy_term = true,
                                         double log_std_min = -20.0,
                                         double log_std_max = 2.0) {
  internal::check_critics(critics, targets);
  CriticLoss out;
  const SquashedSample next = sample_squashed(actor, batch.next_states, next_noise,
                                              scale, log_std_min, log_std_max);
  out.target_actions = next.actions;
  const MatrixXd next_input = critic_input(batch.next_states, next.actions);
  const VectorXd q_next = internal::min_target_q(targets, next_input, mask);
  out.target_mask = &mask;
  const VectorXd bonus = alpha * next.log_prob;
  if (discount_entropy_term) {
    out.targets = batch.rewards + discount * batch.not_terminal.cwiseProduct(q_next - bonus);
  } else {
    out.targets = batch.rewards + discount * batch.not_terminal.cwiseProduct(q_next) - bonus;
  }
  internal::regress_critics(critics, batch, mask, out);
  return out;
}

/// Reparameterized policy objective through unmasked critics:
///   L = mean_n (alpha log pi(a~_n|s_n) - min_k Q_k(s_n, a~_n)).
inline ActorLoss stochastic_actor_loss(const MlpParams& actor,
                                       std::span<const MlpParams> critics,
                                       const Batch& batch, const MatrixXd& noise,
                                       const ActionScale& scale, double alpha,
                                       double log_std_min = -20.0,
                                       double log_std_max = 2.0) {
  if (critics.empty()) throw ConfigError("actor loss needs a critic");
  ActorLoss out;
  const SquashedSample s =
      sample_squashed(actor, batch.states, noise, scale, log_std_min, log_std_max);
  out.actions = s.actions;
  const double n = double(batch.size());
  const MatrixXd input = critic_input(batch.states, s.actions);

  // Per sample, the critic with the smaller value carries the gradient.
  std::vector<ForwardCache> caches(critics.size());
  std::vector<VectorXd> qs;
  for (std::size_t k = 0; k < critics.size(); ++k) {
    qs.push_back(forward_batch(critics[k], input, {}, &caches[k]).row(0).transpose());
  }
  VectorXd q_min = qs[0];
  std::vector<int> argmin(std::size_t(batch.size()), 0);
  for (std::size_t k = 1; k < qs.size(); ++k) {
    for (Index i = 0; i < q_min.size(); ++i) {
      if (qs[k][i] < q_min[i]) {
        q_min[i] = qs[k][i];
        argmin[std::size_t(i)] = int(k);
      }
    }
  }
  out.mean_log_prob = s.log_prob.mean();
  out.loss = (alpha * s.log_prob - q_min).sum() / n;

  MatrixXd d_action = MatrixXd::Zero(actor.output_dim(), batch.size());
  for (std::size_t k = 0; k < critics.size(); ++k) {
    MatrixXd d_q = MatrixXd::Zero(1, batch.size());
    bool used = false;
    for (Index i = 0; i < batch.size(); ++i) {
      if (argmin[std::size_t(i)] == int(k)) {
        d_q(0, i) = -1.0 / n;
        used = true;
      }
    }
    if (!used) continue;
    d_action += backward_batch(critics[k], caches[k], d_q, nullptr).bottomRows(actor.output_dim());
  }
  // dL/du = dL/da * half * (1 - tanh^2) + (alpha / n) * 2 tanh(u)
  const MatrixXd one_minus_t2 = (1.0 - s.squashed.array().square()).matrix();
  const MatrixXd d_u =
      ((d_action.array().colwise() * scale.half_range.array()) * one_minus_t2.array() +
       (2.0 * alpha / n) * s.squashed.array())
          .matrix();
  out.grads = actor.zeros_like();
  backward_batch(actor, s.cache, d_u, &out.grads);
  const VectorXd sigma = s.log_std.array().exp();
  auto d_log_std = out.grads.log_std();
  for (Index j = 0; j < actor.output_dim(); ++j) {
    const double raw = actor.log_std()[j];
    if (raw < log_std_min || raw > log_std_max) continue;
    d_log_std[j] = sigma[j] * d_u.row(j).dot(noise.row(j)) - alpha;
  }
  return out;
}

struct AlphaLoss {
  double loss = 0.0;
  double grad_log_alpha = 0.0;
};

/// Temperature objective on log alpha with log pi held constant:
///   J = mean(-alpha (log pi + H)),  dJ/dlog(alpha) = -alpha (mean log pi + H).
inline AlphaLoss alpha_loss(double log_alpha, double mean_log_prob, double target_entropy) {
  const double alpha = std::exp(log_alpha);
  return {-alpha * (mean_log_prob + target_entropy),
          -alpha * (mean_log_prob + target_entropy)};
}

}  // namespace mepg
