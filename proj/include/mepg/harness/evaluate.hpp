#pragma once

#include <cmath>
#include <cstdint>
#include <memory>

#include "mepg/agents/agent.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/envs/env.hpp"

namespace mepg {

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over episodes
};

/// Rolls out the agent's deterministic policy on a private copy of `env`.
/// Episode reset seeds come from Rng(seed) only, so the outcome does not
/// depend on any training stream.
inline EvalResult evaluate(const Agent& agent, const Env& env, int episodes,
                           std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("need at least one evaluation episode");
  std::unique_ptr<Env> eval_env = env.clone();
  Rng seeds(seed);
  Rng unused(0);  // act() without exploration draws nothing
  std::vector<double> returns;
  returns.reserve(std::size_t(episodes));
  for (int e = 0; e < episodes; ++e) {
    VectorXd obs = eval_env->reset(seeds.next_seed());
    double total = 0.0;
    while (true) {
      const StepResult r = eval_env->step(agent.act(obs, false, unused));
      total += r.reward;
      if (r.done) break;
      obs = r.observation;
    }
    returns.push_back(total);
  }
  EvalResult out;
  for (double r : returns) out.mean += r;
  out.mean /= double(episodes);
  double var = 0.0;
  for (double r : returns) var += (r - out.mean) * (r - out.mean);
  out.std = std::sqrt(var / double(episodes));
  return out;
}

inline EvalResult evaluate(const Agent& agent, const Env& env, std::uint64_t seed) {
  return evaluate(agent, env, 10, seed);
}

}  // namespace mepg
