#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mepg/agents/config.hpp"
#include "mepg/numerics/adam.hpp"

namespace mepg {

/// State and action sizes of a benchmark task.
struct TaskShape {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
};

/// The PyBullet locomotion and pendulum tasks the published tables cover.
inline std::vector<TaskShape> benchmark_shapes() {
  return {{"Ant", 28, 8},   {"HalfCheetah", 26, 6},  {"Hopper", 15, 3},
          {"Walker2D", 22, 6}, {"InvPen", 5, 1},     {"InvDouPen", 9, 1},
          {"InvPenSwingup", 5, 1}, {"Reacher", 9, 2}};
}

/// Network parameters held by an algorithm, counting every online and target
/// network. REDQ keeps ten critics and their targets with one actor; SUNRISE
/// runs an ensemble of three SAC agents.
inline std::size_t footprint(std::string_view algorithm, int state_dim, int action_dim,
                             const std::vector<int>& hidden = {256, 256}) {
  std::vector<int> actor{state_dim}, critic{state_dim + action_dim};
  for (int h : hidden) {
    actor.push_back(h);
    critic.push_back(h);
  }
  actor.push_back(action_dim);
  critic.push_back(1);
  const std::size_t det_actor = mlp_parameter_count(actor, OutputHead::kTanh);
  const std::size_t gauss_actor = mlp_parameter_count(actor, OutputHead::kGaussian);
  const std::size_t q = mlp_parameter_count(critic, OutputHead::kLinear);
  const std::string a = internal::lower(algorithm);
  if (a == "me-ddpg" || a == "me" || a == "ddpg") return 2 * det_actor + 2 * q;
  if (a == "td3") return 2 * det_actor + 4 * q;
  if (a == "me-sac") return gauss_actor + 2 * q;
  if (a == "sac") return gauss_actor + 4 * q;
  if (a == "redq") return gauss_actor + 20 * q;
  if (a == "sunrise") return 3 * (gauss_actor + 4 * q);
  throw ConfigError("no parameter model for '" + std::string(algorithm) + "'");
}

inline std::vector<std::string> footprint_algorithms() {
  return {"ME-DDPG", "ME-SAC", "TD3", "SAC", "REDQ", "SUNRISE"};
}

/// CSV with one row per algorithm and one column per task, raw counts.
inline std::string parameter_table_csv(const std::vector<int>& hidden = {256, 256}) {
  std::string out = "algorithm";
  const auto shapes = benchmark_shapes();
  for (const auto& s : shapes) out += ',' + s.name;
  out += '\n';
  for (const auto& a : footprint_algorithms()) {
    out += a;
    for (const auto& s : shapes) {
      out += ',' + std::to_string(footprint(a, s.state_dim, s.action_dim, hidden));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mepg
