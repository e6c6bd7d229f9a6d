#pragma once

#include "mepg/envs/env.hpp"

namespace mepg {

/// Planar point driven by a velocity command toward a goal.
/// Observation [px, py, gx - px, gy - py]; reward -|p' - g| after the move.
class Reacher2d final : public Env {
 public:
  static constexpr double kDt = 0.05;

  Reacher2d()
      : Env({"reacher2d", 4, 2, VectorXd::Constant(2, -1.0),
             VectorXd::Constant(2, 1.0), 200, "per-step reward in [-2 sqrt(2) - 1, 0]"}) {}

  VectorXd observe() const override {
    VectorXd o(4);
    o << pos_, goal_ - pos_;
    return o;
  }
  std::unique_ptr<Env> clone() const override { return std::make_unique<Reacher2d>(*this); }

  void set_state(const Eigen::Vector2d& pos, const Eigen::Vector2d& goal) {
    pos_ = pos;
    goal_ = goal;
  }
  const Eigen::Vector2d& position() const { return pos_; }
  const Eigen::Vector2d& goal() const { return goal_; }

 protected:
  void reset_state(Rng& rng) override {
    pos_ = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    goal_ = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  }
  double advance(const VectorXd& action) override {
    pos_ += kDt * action.head<2>();
    return -(pos_ - goal_).norm();
  }

 private:
  Eigen::Vector2d pos_ = Eigen::Vector2d::Zero();
  Eigen::Vector2d goal_ = Eigen::Vector2d::Zero();
};

}  // namespace mepg
