#pragma once

#include <cassert>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "mepg/agents/config.hpp"
#include "mepg/agents/losses.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/dropout/dropout.hpp"
#include "mepg/envs/env.hpp"
#include "mepg/numerics/adam.hpp"
#include "mepg/replay/replay_buffer.hpp"

namespace mepg {

struct UpdateReport {
  bool critic_updated = false;
  bool actor_updated = false;
  double critic_loss = std::numeric_limits<double>::quiet_NaN();
  double actor_loss = std::numeric_limits<double>::quiet_NaN();
  double alpha_loss = std::numeric_limits<double>::quiet_NaN();
};

/// Copy of what the last critic update consumed; filled when
/// AgentConfig::record_trace is set.
struct UpdateTrace {
  DropoutMask mask;
  bool mask_shared = false;  // online and target passes saw the same mask object
  MatrixXd target_actions;
  MatrixXd target_policy_actions;  // pi'(s') before smoothing (deterministic family)
  VectorXd targets;
};

/// Common interface of the DDPG-family and SAC-family agents.
class Agent {
 public:
  virtual ~Agent() = default;

  /// Action for one observation; exploration noise only when `explore`.
  virtual VectorXd act(const VectorXd& observation, bool explore, Rng& rng) const = 0;
  /// One critic step and, on delay boundaries, the actor (and temperature)
  /// step followed by target updates. `step` is the global interaction step.
  virtual UpdateReport update(const ReplayBuffer& buffer, long step, Rng& train_rng,
                              Rng& dropout_rng) = 0;
  /// Scalars across every network the agent keeps, targets included.
  virtual std::size_t parameter_count() const = 0;
  /// Every trainable scalar concatenated, for trajectory comparisons.
  virtual VectorXd flat_parameters() const = 0;

  const std::string& name() const { return name_; }
  const AgentConfig& config() const { return config_; }
  const EnvSpec& spec() const { return spec_; }
  const UpdateTrace& last_trace() const { return trace_; }

 protected:
  Agent(std::string name, AgentConfig config, EnvSpec spec)
      : name_(std::move(name)), config_(std::move(config)), spec_(std::move(spec)),
        scale_(spec_) {
    config_.validate();
  }

  bool policy_step(long step) const {
    return !config_.use_delay || step % config_.policy_delay == 0;
  }

  DropoutMask critic_mask(Rng& dropout_rng) const {
    const double p = config_.use_dropout ? config_.drop_probability : 0.0;
    return sample_mask(config_.batch_size, config_.hidden, p, dropout_rng,
                       config_.masked_layers, config_.mask_sharing);
  }

  std::vector<int> critic_widths() const {
    std::vector<int> w{spec_.state_dim + spec_.action_dim};
    w.insert(w.end(), config_.hidden.begin(), config_.hidden.end());
    w.push_back(1);
    return w;
  }
  std::vector<int> actor_widths() const {
    std::vector<int> w{spec_.state_dim};
    w.insert(w.end(), config_.hidden.begin(), config_.hidden.end());
    w.push_back(spec_.action_dim);
    return w;
  }

  void record(const DropoutMask& mask, const CriticLoss& loss) {
    assert(loss.online_mask == loss.target_mask);
    if (!config_.record_trace) return;
    trace_.mask = mask;
    trace_.mask_shared = loss.online_mask == &mask && loss.target_mask == &mask;
    trace_.target_actions = loss.target_actions;
    trace_.targets = loss.targets;
  }

  std::string name_;
  AgentConfig config_;
  EnvSpec spec_;
  ActionScale scale_;
  UpdateTrace trace_;
};

/// DDPG / TD3 / ME-DDPG: tanh actor with target, one or two critics.
class DeterministicAgent final : public Agent {
 public:
  DeterministicAgent(std::string name, AgentConfig config, EnvSpec spec, Rng& init_rng)
      : Agent(std::move(name), std::move(config), std::move(spec)) {
    actor_ = MlpParams::initialized(actor_widths(), OutputHead::kTanh, init_rng);
    actor_target_ = actor_;
    actor_opt_ = AdamState(actor_, {config_.actor_lr});
    const int n_critics = config_.use_cdq ? 2 : 1;
    for (int k = 0; k < n_critics; ++k) {
      critics_.push_back(MlpParams::initialized(critic_widths(), OutputHead::kLinear, init_rng));
      critic_opts_.emplace_back(critics_.back(), AdamConfig{config_.critic_lr});
    }
    critic_targets_ = critics_;
  }

  VectorXd act(const VectorXd& observation, bool explore, Rng& rng) const override {
    VectorXd a = scale_.to_env(forward_batch(actor_, MatrixXd(observation))).col(0);
    if (explore && config_.exploration_noise > 0.0) {
      for (Index j = 0; j < a.size(); ++j) {
        a[j] += rng.normal(0.0, config_.exploration_noise * scale_.half_range[j]);
      }
      a = spec_.clip(a);
    }
    return a;
  }

  UpdateReport update(const ReplayBuffer& buffer, long step, Rng& train_rng,
                      Rng& dropout_rng) override {
    UpdateReport report;
    const Batch batch = buffer.sample(config_.batch_size, train_rng);
    MatrixXd noise = MatrixXd::Zero(spec_.action_dim, batch.size());
    if (config_.use_tps) {
      for (Index n = 0; n < noise.cols(); ++n) {
        for (Index j = 0; j < noise.rows(); ++j) {
          const double h = scale_.half_range[j];
          const double e = train_rng.normal(0.0, config_.target_noise * h);
          noise(j, n) = std::clamp(e, -config_.noise_clip * h, config_.noise_clip * h);
        }
      }
    }
    const DropoutMask mask = critic_mask(dropout_rng);
    CriticLoss loss = deterministic_critic_loss(critics_, critic_targets_, actor_target_, batch,
                                                noise, mask, scale_, config_.discount);
    record(mask, loss);
    if (config_.record_trace) {
      trace_.target_policy_actions =
          scale_.to_env(forward_batch(actor_target_, batch.next_states));
    }
    for (std::size_t k = 0; k < critics_.size(); ++k) {
      adam_step(critic_opts_[k], critics_[k], loss.grads[k]);
    }
    report.critic_updated = true;
    report.critic_loss = loss.loss;

    if (policy_step(step)) {
      const ActorLoss actor_loss = deterministic_actor_loss(actor_, critics_[0], batch, scale_);
      adam_step(actor_opt_, actor_, actor_loss.grads);
      for (std::size_t k = 0; k < critics_.size(); ++k) {
        soft_update(critic_targets_[k], critics_[k], config_.target_mix);
      }
      soft_update(actor_target_, actor_, config_.target_mix);
      report.actor_updated = true;
      report.actor_loss = actor_loss.loss;
    }
    return report;
  }

  std::size_t parameter_count() const override {
    return actor_.parameter_count() + actor_target_.parameter_count() +
           parameter_count_of(critics_) + parameter_count_of(critic_targets_);
  }

  VectorXd flat_parameters() const override {
    std::vector<const MlpParams*> nets{&actor_, &actor_target_};
    for (const auto& c : critics_) nets.push_back(&c);
    for (const auto& c : critic_targets_) nets.push_back(&c);
    return concat(nets);
  }

  const MlpParams& actor() const { return actor_; }
  const MlpParams& actor_target() const { return actor_target_; }
  const std::vector<MlpParams>& critics() const { return critics_; }
  const std::vector<MlpParams>& critic_targets() const { return critic_targets_; }
  MlpParams& mutable_actor() { return actor_; }
  std::vector<MlpParams>& mutable_critics() { return critics_; }
  std::vector<MlpParams>& mutable_critic_targets() { return critic_targets_; }

 private:
  static std::size_t parameter_count_of(const std::vector<MlpParams>& nets) {
    return mepg::parameter_count(std::span<const MlpParams>(nets));
  }
  static VectorXd concat(const std::vector<const MlpParams*>& nets) {
    Index total = 0;
    for (const auto* n : nets) total += n->flat().size();
    VectorXd out(total);
    Index off = 0;
    for (const auto* n : nets) {
      out.segment(off, n->flat().size()) = n->flat();
      off += n->flat().size();
    }
    return out;
  }

  MlpParams actor_;
  MlpParams actor_target_;
  AdamState actor_opt_;
  std::vector<MlpParams> critics_;
  std::vector<MlpParams> critic_targets_;
  std::vector<AdamState> critic_opts_;
};

/// SAC / ME-SAC: squashed-Gaussian actor with a state-independent log-std,
/// one critic (two with CDQ) plus targets, learned or fixed temperature.
class StochasticAgent final : public Agent {
 public:
  StochasticAgent(std::string name, AgentConfig config, EnvSpec spec, Rng& init_rng)
      : Agent(std::move(name), std::move(config), std::move(spec)) {
    actor_ = MlpParams::initialized(actor_widths(), OutputHead::kGaussian, init_rng);
    actor_opt_ = AdamState(actor_, {config_.actor_lr});
    const int n_critics = config_.use_cdq ? 2 : 1;
    for (int k = 0; k < n_critics; ++k) {
      critics_.push_back(MlpParams::initialized(critic_widths(), OutputHead::kLinear, init_rng));
      critic_opts_.emplace_back(critics_.back(), AdamConfig{config_.critic_lr});
    }
    critic_targets_ = critics_;
    log_alpha_ = VectorXd::Constant(
        1, std::log(config_.auto_entropy ? config_.initial_alpha : config_.fixed_alpha_value));
    alpha_opt_ = AdamState(1, {config_.alpha_lr});
    target_entropy_ = config_.resolved_target_entropy(spec_.action_dim);
  }

  VectorXd act(const VectorXd& observation, bool explore, Rng& rng) const override {
    const MatrixXd obs(observation);
    if (!explore) {
      const MatrixXd mean = forward_batch(actor_, obs);
      return scale_.to_env(mean.array().tanh().matrix()).col(0);
    }
    MatrixXd noise(spec_.action_dim, 1);
    for (Index j = 0; j < noise.rows(); ++j) noise(j, 0) = rng.normal();
    return sample_squashed(actor_, obs, noise, scale_, config_.log_std_min,
                           config_.log_std_max)
        .actions.col(0);
  }

  UpdateReport update(const ReplayBuffer& buffer, long step, Rng& train_rng,
                      Rng& dropout_rng) override {
    UpdateReport report;
    const Batch batch = buffer.sample(config_.batch_size, train_rng);
    const MatrixXd next_noise = standard_normal(batch.size(), train_rng);
    const DropoutMask mask = critic_mask(dropout_rng);
    CriticLoss loss = stochastic_critic_loss(critics_, critic_targets_, actor_, batch,
                                             next_noise, mask, scale_, config_.discount,
                                             alpha(), config_.discount_entropy_term,
                                             config_.log_std_min, config_.log_std_max);
    record(mask, loss);
    for (std::size_t k = 0; k < critics_.size(); ++k) {
      adam_step(critic_opts_[k], critics_[k], loss.grads[k]);
    }
    report.critic_updated = true;
    report.critic_loss = loss.loss;

    if (policy_step(step)) {
      const MatrixXd noise = standard_normal(batch.size(), train_rng);
      const ActorLoss actor_loss =
          stochastic_actor_loss(actor_, critics_, batch, noise, scale_, alpha(),
                                config_.log_std_min, config_.log_std_max);
      adam_step(actor_opt_, actor_, actor_loss.grads);
      report.actor_updated = true;
      report.actor_loss = actor_loss.loss;
      if (config_.auto_entropy) {
        const AlphaLoss al = alpha_loss(log_alpha_[0], actor_loss.mean_log_prob, target_entropy_);
        alpha_opt_.step(log_alpha_, VectorXd::Constant(1, al.grad_log_alpha));
        report.alpha_loss = al.loss;
      }
      for (std::size_t k = 0; k < critics_.size(); ++k) {
        soft_update(critic_targets_[k], critics_[k], config_.target_mix);
      }
    }
    return report;
  }

  std::size_t parameter_count() const override {
    std::size_t total = actor_.parameter_count();
    for (const auto& c : critics_) total += c.parameter_count();
    for (const auto& c : critic_targets_) total += c.parameter_count();
    return total;
  }

  VectorXd flat_parameters() const override {
    Index total = actor_.flat().size() + 1;
    for (const auto& c : critics_) total += 2 * c.flat().size();
    VectorXd out(total);
    Index off = 0;
    auto put = [&](const VectorXd& v) {
      out.segment(off, v.size()) = v;
      off += v.size();
    };
    put(actor_.flat());
    for (const auto& c : critics_) put(c.flat());
    for (const auto& c : critic_targets_) put(c.flat());
    put(log_alpha_);
    return out;
  }

  double alpha() const { return std::exp(log_alpha_[0]); }
  double target_entropy() const { return target_entropy_; }
  const MlpParams& actor() const { return actor_; }
  const std::vector<MlpParams>& critics() const { return critics_; }
  const std::vector<MlpParams>& critic_targets() const { return critic_targets_; }
  MlpParams& mutable_actor() { return actor_; }
  std::vector<MlpParams>& mutable_critics() { return critics_; }

 private:
  MatrixXd standard_normal(Index cols, Rng& rng) const {
    MatrixXd m(spec_.action_dim, cols);
    for (Index n = 0; n < cols; ++n) {
      for (Index j = 0; j < m.rows(); ++j) m(j, n) = rng.normal();
    }
    return m;
  }

  MlpParams actor_;
  AdamState actor_opt_;
  std::vector<MlpParams> critics_;
  std::vector<MlpParams> critic_targets_;
  std::vector<AdamState> critic_opts_;
  VectorXd log_alpha_;
  AdamState alpha_opt_;
  double target_entropy_ = 0.0;
};

inline std::unique_ptr<Agent> make_agent(const AgentRecipe& recipe, const EnvSpec& spec,
                                         Rng& init_rng) {
  if (recipe.family == AgentFamily::kDeterministic) {
    return std::make_unique<DeterministicAgent>(recipe.name, recipe.config, spec, init_rng);
  }
  return std::make_unique<StochasticAgent>(recipe.name, recipe.config, spec, init_rng);
}

/// Agent factory keyed by algorithm or ablation name.
inline std::unique_ptr<Agent> make_agent(std::string_view name, const EnvSpec& spec,
                                         Rng& init_rng, AgentConfig base = {}) {
  return make_agent(resolve_agent(name, std::move(base)), spec, init_rng);
}

}  // namespace mepg
