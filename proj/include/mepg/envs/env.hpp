#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

struct EnvSpec {
  std::string name;
  int state_dim = 0;
  int action_dim = 0;
  VectorXd action_low;
  VectorXd action_high;
  int horizon = 1;
  std::string reward_note;

  void validate() const {
    if (state_dim <= 0 || action_dim <= 0) throw ConfigError("env dims must be positive");
    if (action_low.size() != action_dim || action_high.size() != action_dim) {
      throw ConfigError("action bounds do not match action_dim");
    }
    if (!(action_low.array() < action_high.array()).all()) {
      throw ConfigError("action bounds need low < high");
    }
    if (horizon < 1) throw ConfigError("horizon must be at least 1");
  }
  VectorXd clip(const VectorXd& a) const {
    return a.cwiseMax(action_low).cwiseMin(action_high);
  }
  VectorXd action_center() const { return 0.5 * (action_low + action_high); }
  VectorXd action_half_range() const { return 0.5 * (action_high - action_low); }
};

struct StepResult {
  VectorXd observation;
  double reward = 0.0;
  bool done = false;  // horizon reached; never a genuine terminal state here
};

/// Discrete-time linear dynamics x' = A x + B u with reward
/// -(x'Qx + u'Ru) and a zero-mean reset distribution of covariance
/// reset_covariance.
struct LinearQuadraticModel {
  MatrixXd A, B, Q, R;
  MatrixXd reset_covariance;
};

/// Seeded single-owner environment. reset(seed) fully determines the
/// initial state; step() is deterministic given the state and action.
class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }
  int steps_taken() const { return steps_; }

  VectorXd reset(std::uint64_t seed) {
    Rng rng(seed);
    reset_state(rng);
    steps_ = 0;
    return observe();
  }

  StepResult step(const VectorXd& action) {
    if (action.size() != spec_.action_dim) {
      throw ConfigError("action has wrong dimension for " + spec_.name);
    }
    if (!action.allFinite()) throw NumericError("non-finite action passed to " + spec_.name);
    if (steps_ >= spec_.horizon) throw ConfigError("episode finished; reset first");
    StepResult out;
    out.reward = advance(spec_.clip(action));
    ++steps_;
    out.observation = observe();
    out.done = steps_ == spec_.horizon;
    return out;
  }

  virtual VectorXd observe() const = 0;
  /// Non-null only for linear-quadratic environments.
  virtual const LinearQuadraticModel* linear_quadratic() const { return nullptr; }
  virtual std::unique_ptr<Env> clone() const = 0;

 protected:
  explicit Env(EnvSpec spec) : spec_(std::move(spec)) { spec_.validate(); }
  virtual void reset_state(Rng& rng) = 0;
  /// Applies an in-bounds action and returns the reward.
  virtual double advance(const VectorXd& action) = 0;

 private:
  EnvSpec spec_;
  int steps_ = 0;
};

}  // namespace mepg
