#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mepg/agents/train_step.hpp"
#include "mepg/envs/registry.hpp"

using namespace mepg;

namespace {

// Small networks and a short warm-up so a few hundred steps exercise every
// update path quickly.
AgentConfig small_config() {
  AgentConfig c;
  c.hidden = {16, 16};
  c.batch_size = 16;
  c.random_start_steps = 40;
  c.buffer_capacity = 10000;
  return c;
}

TrainingState make_state(const std::string& algo, AgentConfig cfg, std::uint64_t seed,
                         const std::string& env = "pendulum") {
  return TrainingState::create(resolve_agent(algo, std::move(cfg)), make_env(env), seed);
}

// Runs `steps` interactions and returns the flat parameters after each one.
std::vector<VectorXd> trajectory(TrainingState& s, int steps) {
  std::vector<VectorXd> out;
  for (int t = 0; t < steps; ++t) {
    train_step(s);
    out.push_back(s.agent->flat_parameters());
  }
  return out;
}

}  // namespace

TEST(Resolve, BaseAlgorithms) {
  const AgentRecipe ddpg = resolve_agent("ddpg");
  EXPECT_EQ(ddpg.family, AgentFamily::kDeterministic);
  EXPECT_FALSE(ddpg.config.use_dropout || ddpg.config.use_cdq || ddpg.config.use_tps ||
               ddpg.config.use_delay);
  const AgentRecipe td3 = resolve_agent("TD3");
  EXPECT_TRUE(td3.config.use_cdq && td3.config.use_tps && td3.config.use_delay);
  EXPECT_FALSE(td3.config.use_dropout);
  const AgentRecipe med = resolve_agent("me-ddpg");
  EXPECT_TRUE(med.config.use_dropout && med.config.use_tps && med.config.use_delay);
  EXPECT_FALSE(med.config.use_cdq);
  const AgentRecipe sac = resolve_agent("sac");
  EXPECT_EQ(sac.family, AgentFamily::kStochastic);
  EXPECT_TRUE(sac.config.use_cdq && sac.config.auto_entropy);
  const AgentRecipe mes = resolve_agent("me-sac");
  EXPECT_TRUE(mes.config.use_dropout && mes.config.use_delay);
  EXPECT_FALSE(mes.config.use_cdq);
  EXPECT_THROW(resolve_agent("ppo"), ConfigError);
}

TEST(Resolve, AblationNamesFlipOneSwitch) {
  const AgentConfig med = resolve_agent("me-ddpg").config;
  EXPECT_TRUE(resolve_agent("ME+CDQ").config.use_cdq);
  EXPECT_FALSE(resolve_agent("MED-DO").config.use_dropout);
  EXPECT_FALSE(resolve_agent("MED-DU").config.use_delay);
  EXPECT_FALSE(resolve_agent("MED-TPS").config.use_tps);
  EXPECT_TRUE(resolve_agent("MES+CQD").config.use_cdq);
  EXPECT_FALSE(resolve_agent("MES-DU").config.use_delay);
  EXPECT_FALSE(resolve_agent("MES+FIXENT").config.auto_entropy);
  EXPECT_EQ(resolve_agent("MED-DO").config.use_tps, med.use_tps);
  for (const auto& algo : {"me-ddpg", "me-sac"}) {
    for (const auto& name : ablation_names(algo)) EXPECT_NO_THROW(resolve_agent(name)) << name;
  }
}

TEST(Resolve, ToggleErrors) {
  AgentConfig c;
  EXPECT_THROW(apply_toggle(c, "cdq"), ConfigError);
  EXPECT_THROW(apply_toggle(c, "+xyz"), ConfigError);
  apply_toggle(c, "+fixent");
  EXPECT_FALSE(c.auto_entropy);
  AgentConfig bad;
  bad.drop_probability = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.drop_probability = 0.1;
  bad.policy_delay = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(DeterministicAct, GreedyIsRepeatableAndZeroNoiseMatches) {
  Rng init(1), rng(2);
  const EnvSpec spec = make_env("pendulum")->spec();
  AgentConfig cfg = small_config();
  DeterministicAgent agent("me-ddpg", cfg, spec, init);
  const VectorXd obs = VectorXd::Constant(3, 0.3);
  EXPECT_EQ(agent.act(obs, false, rng), agent.act(obs, false, rng));
  cfg.exploration_noise = 0.0;
  Rng init2(1);
  DeterministicAgent quiet("me-ddpg", cfg, spec, init2);
  EXPECT_EQ(quiet.act(obs, true, rng), quiet.act(obs, false, rng));
}

TEST(DeterministicAct, ExplorationNoiseStd) {
  Rng init(3), rng(4);
  const EnvSpec spec = make_env("pendulum")->spec();  // half range 2
  DeterministicAgent agent("me-ddpg", small_config(), spec, init);
  agent.mutable_actor().flat().setZero();  // policy output sits at the center
  const VectorXd obs = VectorXd::Zero(3);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = agent.act(obs, true, rng)[0];
    sum += a;
    sum_sq += a * a;
  }
  const double sd = std::sqrt(sum_sq / n - std::pow(sum / n, 2));
  const double expected = 0.2 * 2.0;
  EXPECT_NEAR(sd, expected, 4 * expected / std::sqrt(2.0 * n));
}

TEST(StochasticAct, BoundedAndGreedyRepeatable) {
  Rng init(5), rng(6);
  const EnvSpec spec = make_env("reacher2d")->spec();
  StochasticAgent agent("me-sac", small_config(), spec, init);
  agent.mutable_actor().log_std().setConstant(1.5);  // wide, pushes mass to the bounds
  for (int i = 0; i < 2000; ++i) {
    VectorXd obs(spec.state_dim);
    for (Index j = 0; j < obs.size(); ++j) obs[j] = rng.normal(0.0, 3.0);
    const VectorXd a = agent.act(obs, true, rng);
    EXPECT_TRUE((a.array() >= spec.action_low.array()).all());
    EXPECT_TRUE((a.array() <= spec.action_high.array()).all());
  }
  const VectorXd obs = VectorXd::Constant(spec.state_dim, 0.1);
  EXPECT_EQ(agent.act(obs, false, rng), agent.act(obs, false, rng));
}

TEST(TrainStep, RandomStartPerformsNoUpdates) {
  TrainingState s = make_state("me-ddpg", small_config(), 7);
  const VectorXd before = s.agent->flat_parameters();
  for (int t = 0; t < 40; ++t) {
    const StepReport r = train_step(s);
    EXPECT_TRUE(r.random_action);
    EXPECT_FALSE(r.update.critic_updated);
  }
  EXPECT_EQ(s.agent->flat_parameters(), before);
  EXPECT_EQ(s.buffer.size(), 40);
  const StepReport first = train_step(s);
  EXPECT_FALSE(first.random_action);
  EXPECT_TRUE(first.update.critic_updated);
}

TEST(TrainStep, ActorChangesOnEvenStepsOnly) {
  for (const std::string algo : {"me-ddpg", "me-sac"}) {
    TrainingState s = make_state(algo, small_config(), 8);
    while (s.step < 40) train_step(s);
    for (int t = 0; t < 60; ++t) {
      const long step = s.step;
      VectorXd actor_before, actor_after;
      double alpha_before = 0.0;
      if (auto* d = dynamic_cast<DeterministicAgent*>(s.agent.get())) {
        actor_before = d->actor().flat();
      } else {
        auto* st = dynamic_cast<StochasticAgent*>(s.agent.get());
        actor_before = st->actor().flat();
        alpha_before = st->alpha();
      }
      const StepReport r = train_step(s);
      EXPECT_EQ(r.update.actor_updated, step % 2 == 0) << algo << " step " << step;
      if (auto* d = dynamic_cast<DeterministicAgent*>(s.agent.get())) {
        actor_after = d->actor().flat();
      } else {
        auto* st = dynamic_cast<StochasticAgent*>(s.agent.get());
        actor_after = st->actor().flat();
        EXPECT_EQ(st->alpha() != alpha_before, step % 2 == 0) << algo << " step " << step;
      }
      EXPECT_EQ(actor_after != actor_before, step % 2 == 0) << algo << " step " << step;
    }
  }
}

TEST(TrainStep, NoDelayUpdatesActorEveryStep) {
  TrainingState s = make_state("MED-DU", small_config(), 9);
  while (s.step < 40) train_step(s);
  for (int t = 0; t < 10; ++t) EXPECT_TRUE(train_step(s).update.actor_updated);
}

TEST(TrainStep, IdenticalSeedsReplayBitwise) {
  for (const std::string algo : {"me-ddpg", "me-sac"}) {
    TrainingState a = make_state(algo, small_config(), 11), b = make_state(algo, small_config(), 11);
    const auto ta = trajectory(a, 1000), tb = trajectory(b, 1000);
    for (std::size_t t = 0; t < ta.size(); ++t) ASSERT_EQ(ta[t], tb[t]) << algo << " step " << t;
    TrainingState c = make_state(algo, small_config(), 12);
    EXPECT_NE(trajectory(c, 1000).back(), ta.back()) << algo;
  }
}

TEST(Reduction, ZeroDropoutMatchesNonDropoutCounterpart) {
  // ME-DDPG at p=0 against DDPG+TPS+DU (TD3 without CDQ), ME-SAC at p=0
  // against single-critic delayed SAC.
  const std::vector<std::pair<std::string, std::string>> pairs{{"me-ddpg", "MED-DO"},
                                                               {"me-sac", "MES-DO"}};
  for (const auto& [dropout_name, plain_name] : pairs) {
    AgentConfig cfg = small_config();
    cfg.drop_probability = 0.0;
    TrainingState a = make_state(dropout_name, cfg, 13);
    TrainingState b = make_state(plain_name, small_config(), 13);
    ASSERT_FALSE(b.agent->config().use_dropout);
    const auto ta = trajectory(a, 400), tb = trajectory(b, 400);
    for (std::size_t t = 0; t < ta.size(); ++t) {
      ASSERT_EQ(ta[t], tb[t]) << dropout_name << " step " << t;
    }
  }
}

TEST(Reduction, NonzeroDropoutDiverges) {
  TrainingState a = make_state("me-ddpg", small_config(), 14);
  TrainingState b = make_state("MED-DO", small_config(), 14);
  EXPECT_NE(trajectory(a, 200).back(), trajectory(b, 200).back());
}

TEST(UpdatePath, MaskSharedAndIdentityWithoutDropout) {
  AgentConfig cfg = small_config();
  cfg.record_trace = true;
  cfg.drop_probability = 0.5;
  for (const std::string algo : {"me-ddpg", "me-sac"}) {
    TrainingState s = make_state(algo, cfg, 15);
    while (s.step < 45) train_step(s);
    const UpdateTrace& tr = s.agent->last_trace();
    EXPECT_TRUE(tr.mask_shared);
    double kept = 0.0, total = 0.0;
    for (const MatrixXd& l : tr.mask.layers()) {
      kept += l.sum();
      total += double(l.size());
    }
    EXPECT_LT(kept, total) << algo;
  }
  for (const std::string algo : {"MED-DO", "MES-DO"}) {
    TrainingState s = make_state(algo, cfg, 15);
    while (s.step < 45) train_step(s);
    const UpdateTrace& tr = s.agent->last_trace();
    EXPECT_EQ(tr.mask.scale(), 1.0);
    for (const MatrixXd& l : tr.mask.layers()) {
      EXPECT_EQ(l, MatrixXd::Ones(l.rows(), l.cols())) << algo;
    }
  }
}

TEST(UpdatePath, NoSmoothingUsesTargetPolicyExactly) {
  AgentConfig cfg = small_config();
  cfg.record_trace = true;
  TrainingState plain = make_state("MED-TPS", cfg, 16);
  TrainingState smooth = make_state("me-ddpg", cfg, 16);
  while (plain.step < 45) {
    train_step(plain);
    train_step(smooth);
  }
  EXPECT_EQ(plain.agent->last_trace().target_actions,
            plain.agent->last_trace().target_policy_actions);
  EXPECT_NE(smooth.agent->last_trace().target_actions,
            smooth.agent->last_trace().target_policy_actions);
}

TEST(UpdatePath, CdqCreatesTwoCriticsAndFixentFreezesAlpha) {
  TrainingState cdq = make_state("ME+CDQ", small_config(), 17);
  EXPECT_EQ(dynamic_cast<DeterministicAgent&>(*cdq.agent).critics().size(), 2u);
  EXPECT_EQ(dynamic_cast<DeterministicAgent&>(*make_state("me-ddpg", small_config(), 17).agent)
                .critics()
                .size(),
            1u);
  TrainingState fix = make_state("MES+FIXENT", small_config(), 18);
  auto& agent = dynamic_cast<StochasticAgent&>(*fix.agent);
  const double alpha = agent.alpha();
  EXPECT_DOUBLE_EQ(alpha, agent.config().fixed_alpha_value);
  trajectory(fix, 200);
  EXPECT_EQ(agent.alpha(), alpha);
  TrainingState autoent = make_state("me-sac", small_config(), 18);
  auto& tuned = dynamic_cast<StochasticAgent&>(*autoent.agent);
  const double start = tuned.alpha();
  trajectory(autoent, 200);
  EXPECT_NE(tuned.alpha(), start);
}

TEST(UpdatePath, NotReadyBufferPropagates) {
  Rng init(19), train(20), drop(21);
  const EnvSpec spec = make_env("pendulum")->spec();
  DeterministicAgent agent("me-ddpg", small_config(), spec, init);
  ReplayBuffer buf(spec.state_dim, spec.action_dim, 100);
  EXPECT_THROW(agent.update(buf, 0, train, drop), NotReadyError);
}

TEST(Footprint, CountsEveryNetworkIncludingTargets) {
  Rng init(22);
  const EnvSpec spec = make_env("pendulum")->spec();  // 3 -> 1
  AgentConfig cfg = small_config();
  DeterministicAgent med("me-ddpg", cfg, spec, init);
  const std::size_t actor = (3 * 16 + 16) + (16 * 16 + 16) + (16 * 1 + 1);
  const std::size_t critic = (4 * 16 + 16) + (16 * 16 + 16) + (16 + 1);
  EXPECT_EQ(med.parameter_count(), 2 * actor + 2 * critic);
  StochasticAgent mes("me-sac", cfg, spec, init);
  EXPECT_EQ(mes.parameter_count(), actor + 1 + 2 * critic);
}
