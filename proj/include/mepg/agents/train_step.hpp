#pragma once

#include <memory>
#include <optional>

#include "mepg/agents/agent.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/envs/env.hpp"
#include "mepg/replay/replay_buffer.hpp"

namespace mepg {

/// Everything one training run mutates.
struct TrainingState {
  std::unique_ptr<Agent> agent;
  std::unique_ptr<Env> env;
  ReplayBuffer buffer;
  RunStreams streams;
  VectorXd observation;
  long step = 0;
  double episode_return = 0.0;

  TrainingState(std::unique_ptr<Agent> a, std::unique_ptr<Env> e, std::uint64_t seed)
      : agent(std::move(a)),
        env(std::move(e)),
        buffer(env->spec().state_dim, env->spec().action_dim,
               agent->config().buffer_capacity),
        streams(seed) {
    observation = env->reset(streams.env_reset.next_seed());
  }

  /// Agent initialization draws from the training stream of `seed`.
  static TrainingState create(const AgentRecipe& recipe, std::unique_ptr<Env> env,
                              std::uint64_t seed) {
    RunStreams s(seed);
    Rng init = s.train;
    auto agent = make_agent(recipe, env->spec(), init);
    TrainingState state(std::move(agent), std::move(env), seed);
    state.streams.train = init;
    return state;
  }
};

struct StepReport {
  long step = 0;  // global step index of this interaction
  bool random_action = false;
  UpdateReport update;
  std::optional<double> episode_return;  // set when an episode just ended
};

/// One interaction, one push, and (past the random-start phase, once the
/// buffer holds a batch) one agent update.
inline StepReport train_step(TrainingState& s) {
  const AgentConfig& cfg = s.agent->config();
  const EnvSpec& spec = s.env->spec();
  StepReport report;
  report.step = s.step;
  VectorXd action(spec.action_dim);
  if (s.step < cfg.random_start_steps) {
    for (Index j = 0; j < action.size(); ++j) {
      action[j] = s.streams.train.uniform(spec.action_low[j], spec.action_high[j]);
    }
    report.random_action = true;
  } else {
    action = s.agent->act(s.observation, true, s.streams.train);
  }
  const StepResult r = s.env->step(action);
  s.buffer.push({s.observation, action, r.reward, r.observation, false});
  s.episode_return += r.reward;
  if (s.step >= cfg.random_start_steps && s.buffer.size() >= cfg.batch_size) {
    report.update = s.agent->update(s.buffer, s.step, s.streams.train, s.streams.dropout);
  }
  ++s.step;
  if (r.done) {
    report.episode_return = s.episode_return;
    s.episode_return = 0.0;
    s.observation = s.env->reset(s.streams.env_reset.next_seed());
  } else {
    s.observation = r.observation;
  }
  return report;
}

}  // namespace mepg
