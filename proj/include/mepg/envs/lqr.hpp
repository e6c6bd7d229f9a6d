#pragma once

#include <Eigen/Cholesky>

#include "mepg/envs/env.hpp"

namespace mepg {

struct RiccatiSolution {
  MatrixXd P;  // value is -x'Px
  MatrixXd K;  // optimal feedback u = -K x
  int iterations = 0;
  double residual = 0.0;  // max |P - riccati_map(P)| at the returned P
};

/// One application of the discounted Riccati map
///   P -> Q + g A'PA - g^2 A'PB (R + g B'PB)^{-1} B'PA.
inline MatrixXd riccati_map(const LinearQuadraticModel& m, const MatrixXd& P,
                            double discount) {
  const MatrixXd BtPA = m.B.transpose() * P * m.A;
  const MatrixXd S = m.R + discount * m.B.transpose() * P * m.B;
  return m.Q + discount * m.A.transpose() * P * m.A -
         discount * discount * BtPA.transpose() * S.ldlt().solve(BtPA);
}

/// Fixed point of the discounted Riccati recursion, iterated from P = Q
/// until successive iterates differ by less than `tolerance` (max-abs).
inline RiccatiSolution solve_discounted_riccati(const LinearQuadraticModel& m,
                                                double discount,
                                                double tolerance = 1e-10,
                                                int max_iterations = 1000000) {
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw ConfigError("discount must lie in (0, 1]");
  }
  RiccatiSolution sol;
  MatrixXd P = m.Q;
  for (int it = 1; it <= max_iterations; ++it) {
    MatrixXd next = riccati_map(m, P, discount);
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    sol.iterations = it;
    if (change < tolerance) break;
  }
  if (!P.allFinite()) throw NumericError("Riccati iteration diverged");
  sol.P = P;
  const MatrixXd S = m.R + discount * m.B.transpose() * P * m.B;
  sol.K = S.ldlt().solve(discount * m.B.transpose() * P * m.A);
  sol.residual = (riccati_map(m, P, discount) - P).cwiseAbs().maxCoeff();
  return sol;
}

/// Expected discounted return of the unconstrained LQR-optimal policy from
/// the reset distribution: -E[x0'Px0] = -trace(P Sigma0).
inline double optimal_lqr_return(const Env& env, double discount) {
  const LinearQuadraticModel* m = env.linear_quadratic();
  if (!m) throw UnsupportedError(env.spec().name + " is not linear-quadratic");
  const RiccatiSolution sol = solve_discounted_riccati(*m, discount);
  return -(sol.P * m->reset_covariance).trace();
}

}  // namespace mepg
