#pragma once

#include <numbers>

#include "mepg/envs/env.hpp"

namespace mepg {

/// Wraps an angle to [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w < 0.0) w += 2.0 * pi;
  return w - pi;
}

/// Torque-limited pendulum swing-up; theta = 0 is upright.
///   theta_ddot = (g/l) sin(theta) + u / (m l^2), semi-implicit Euler.
class Pendulum final : public Env {
 public:
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kMaxTorque = 2.0;

  Pendulum()
      : Env({"pendulum", 3, 1, VectorXd::Constant(1, -kMaxTorque),
             VectorXd::Constant(1, kMaxTorque), 200,
             "per-step reward in [-(pi^2 + 0.1 w^2 + 0.004), 0]"}) {}

  VectorXd observe() const override {
    VectorXd o(3);
    o << std::cos(theta_), std::sin(theta_), theta_dot_;
    return o;
  }
  std::unique_ptr<Env> clone() const override { return std::make_unique<Pendulum>(*this); }

  void set_state(double theta, double theta_dot) {
    theta_ = theta;
    theta_dot_ = theta_dot;
  }
  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }

 protected:
  void reset_state(Rng& rng) override {
    theta_ = rng.uniform(-std::numbers::pi, std::numbers::pi);
    theta_dot_ = rng.uniform(-1.0, 1.0);
  }
  double advance(const VectorXd& action) override {
    const double u = action[0];
    const double th = wrap_angle(theta_);
    const double reward = -(th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u);
    const double accel = kGravity / kLength * std::sin(theta_) + u / (kMass * kLength * kLength);
    theta_dot_ += kDt * accel;
    theta_ += kDt * theta_dot_;
    return reward;
  }

 private:
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

}  // namespace mepg
