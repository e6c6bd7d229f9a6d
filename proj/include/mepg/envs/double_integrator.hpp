#pragma once

#include "mepg/envs/env.hpp"

namespace mepg {

/// x' = x + dt v, v' = v + dt u, reward -(x^2 + v^2 + 0.1 u^2), |u| <= 1.
class DoubleIntegrator final : public Env {
 public:
  static constexpr double kDt = 0.05;
  static constexpr double kActionCost = 0.1;

  DoubleIntegrator()
      : Env({"double-integrator", 2, 1, VectorXd::Constant(1, -1.0),
             VectorXd::Constant(1, 1.0), 200, "per-step reward <= 0"}) {
    model_.A.resize(2, 2);
    model_.A << 1.0, kDt, 0.0, 1.0;
    model_.B.resize(2, 1);
    model_.B << 0.0, kDt;
    model_.Q = MatrixXd::Identity(2, 2);
    model_.R = MatrixXd::Constant(1, 1, kActionCost);
    // Uniform on [-1, 1]: variance 1/3 per coordinate, independent.
    model_.reset_covariance = MatrixXd::Identity(2, 2) / 3.0;
  }

  VectorXd observe() const override {
    VectorXd o(2);
    o << x_, v_;
    return o;
  }
  const LinearQuadraticModel* linear_quadratic() const override { return &model_; }
  std::unique_ptr<Env> clone() const override {
    return std::make_unique<DoubleIntegrator>(*this);
  }

  void set_state(double x, double v) {
    x_ = x;
    v_ = v;
  }

 protected:
  void reset_state(Rng& rng) override {
    x_ = rng.uniform(-1.0, 1.0);
    v_ = rng.uniform(-1.0, 1.0);
  }
  double advance(const VectorXd& action) override {
    const double u = action[0];
    const double reward = -(x_ * x_ + v_ * v_ + kActionCost * u * u);
    const double x_next = x_ + kDt * v_;
    v_ += kDt * u;
    x_ = x_next;
    return reward;
  }

 private:
  LinearQuadraticModel model_;
  double x_ = 0.0;
  double v_ = 0.0;
};

}  // namespace mepg
