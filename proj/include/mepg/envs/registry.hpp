#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mepg/envs/double_integrator.hpp"
#include "mepg/envs/pendulum.hpp"
#include "mepg/envs/reacher2d.hpp"

namespace mepg {

inline std::vector<std::string> env_names() {
  return {"pendulum", "double-integrator", "reacher2d"};
}

inline std::unique_ptr<Env> make_env(std::string_view name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "double-integrator") return std::make_unique<DoubleIntegrator>();
  if (name == "reacher2d") return std::make_unique<Reacher2d>();
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

}  // namespace mepg
