#pragma once

#include <cmath>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/dropout/dropout.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

/// Monte Carlo dropout estimate at one input.
struct PredictiveEstimate {
  VectorXd mean;
  VectorXd variance;  // unbiased; zero when passes == 1
  int passes = 0;
};

/// K forwards of `input` under independent masks with drop probability p.
inline PredictiveEstimate mc_dropout_predict(const MlpParams& net, const VectorXd& input,
                                             double p, int passes, Rng& rng) {
  if (passes < 1) throw ConfigError("need at least one Monte Carlo pass");
  const std::vector<int> hidden = hidden_widths(net);
  const MatrixXd x(input);
  PredictiveEstimate est;
  est.passes = passes;
  est.mean = VectorXd::Zero(net.output_dim());
  VectorXd m2 = VectorXd::Zero(net.output_dim());
  // Welford accumulation.
  for (int k = 1; k <= passes; ++k) {
    const DropoutMask mask = sample_mask(1, hidden, p, rng);
    const VectorXd y = masked_forward(net, x, mask).col(0);
    const VectorXd delta = y - est.mean;
    est.mean += delta / double(k);
    m2 += delta.cwiseProduct(y - est.mean);
  }
  est.variance = passes > 1 ? VectorXd(m2 / double(passes - 1))
                            : VectorXd::Zero(net.output_dim());
  est.variance = est.variance.cwiseMax(0.0);
  return est;
}

/// Regression data for a critic: column i of `inputs` maps to column i of
/// `targets`.
struct CriticDataset {
  MatrixXd inputs;
  MatrixXd targets;
  Index size() const { return inputs.cols(); }
};

/// Per-layer L2 coefficients.
struct L2Coefficients {
  std::vector<double> weight;
  std::vector<double> bias;
};

/// Prior length scale l, precision eps, per-layer drop probabilities p_i and
/// dataset size N of the deep-GP view of a dropout critic.
struct GpObjectiveConfig {
  double length_scale = 1.0;
  double precision = 1.0;
  std::vector<double> drop_probabilities;
  Index dataset_size = 1;

  void validate(int layers) const {
    if (!(length_scale > 0.0) || !(precision > 0.0) || dataset_size < 1) {
      throw ConfigError("length scale, precision and dataset size must be positive");
    }
    if (int(drop_probabilities.size()) != layers) {
      throw ConfigError("need one drop probability per layer");
    }
    for (double p : drop_probabilities) {
      if (!(p >= 0.0 && p < 1.0)) throw ConfigError("drop probability must lie in [0, 1)");
    }
  }
  /// lambda_W(i) = p_i l^2 / (2 N eps)
  double lambda_weight(int layer) const {
    return drop_probabilities[layer] * length_scale * length_scale /
           (2.0 * double(dataset_size) * precision);
  }
  /// lambda_b = l^2 / (2 N eps)
  double lambda_bias() const {
    return length_scale * length_scale / (2.0 * double(dataset_size) * precision);
  }
  L2Coefficients l2() const {
    L2Coefficients c;
    for (std::size_t i = 0; i < drop_probabilities.size(); ++i) {
      c.weight.push_back(lambda_weight(int(i)));
      c.bias.push_back(lambda_bias());
    }
    return c;
  }
};

namespace internal {

inline MatrixXd predict(const MlpParams& net, const MatrixXd& inputs, const DropoutMask* mask) {
  return mask ? masked_forward(net, inputs, *mask) : forward_batch(net, inputs);
}

}  // namespace internal

/// mean_i 0.5 |Q_i - Q^(x_i)|^2 + sum_l (lw_l |W_l|^2 + lb_l |b_l|^2).
/// A mask, when given, is the realization used for the predictions.
inline double critic_objective(const MlpParams& net, const CriticDataset& data,
                               const L2Coefficients& l2, const DropoutMask* mask = nullptr) {
  if (int(l2.weight.size()) != net.num_layers() || int(l2.bias.size()) != net.num_layers()) {
    throw ConfigError("need one L2 coefficient per layer");
  }
  const MatrixXd residual = data.targets - internal::predict(net, data.inputs, mask);
  double value = 0.5 * residual.squaredNorm() / double(data.size());
  for (int l = 0; l < net.num_layers(); ++l) {
    value += l2.weight[l] * net.weight(l).squaredNorm() + l2.bias[l] * net.bias(l).squaredNorm();
  }
  return value;
}

/// Single-realization deep-GP objective
///   (1/(N eps)) sum_i -log p(Q_i | x_i; w)
///     + (1/(N eps)) sum_l (p_l l^2/2 |G_l|^2 + l^2/2 |m_l|^2)
/// with Gaussian likelihood of precision eps, so that
/// -log p(Q | x; w) = (eps/2) |Q - Q^(x; w)|^2 up to a dropped constant.
/// G_l and m_l are the network's weight matrices and bias vectors; the mask
/// realizes the Bernoulli variables z.
inline double gp_objective(const MlpParams& net, const CriticDataset& data,
                           const GpObjectiveConfig& cfg, const DropoutMask* mask = nullptr) {
  cfg.validate(net.num_layers());
  const double scale = 1.0 / (double(cfg.dataset_size) * cfg.precision);
  const MatrixXd residual = data.targets - internal::predict(net, data.inputs, mask);
  double nll = 0.0;
  for (Index i = 0; i < residual.cols(); ++i) {
    nll += 0.5 * cfg.precision * residual.col(i).squaredNorm();
  }
  const double l2sq = cfg.length_scale * cfg.length_scale;
  double prior = 0.0;
  for (int l = 0; l < net.num_layers(); ++l) {
    prior += 0.5 * cfg.drop_probabilities[l] * l2sq * net.weight(l).squaredNorm() +
             0.5 * l2sq * net.bias(l).squaredNorm();
  }
  return scale * nll + scale * prior;
}

struct EquivalenceReport {
  double max_residual = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> critic_values;
  std::vector<double> gp_values;
};

/// Least-squares affine fit y ~ a x + b; returns the max absolute residual.
inline EquivalenceReport fit_affine(std::vector<double> xs, std::vector<double> ys) {
  const Index n = Index(xs.size());
  MatrixXd design(n, 2);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    design(i, 0) = xs[std::size_t(i)];
    design(i, 1) = 1.0;
    y[i] = ys[std::size_t(i)];
  }
  const VectorXd coef = design.completeOrthogonalDecomposition().solve(y);
  EquivalenceReport r;
  r.slope = coef[0];
  r.intercept = coef[1];
  r.max_residual = (design * coef - y).cwiseAbs().maxCoeff();
  r.critic_values = std::move(xs);
  r.gp_values = std::move(ys);
  return r;
}

/// Draws `trials` random parameter sets for `widths`; for each, samples one
/// mask realization, evaluates both objectives under it (critic L2 weights
/// from `cfg`, weight coefficients multiplied by `lambda_weight_factor`),
/// and fits gp ~ a * critic + b.
inline EquivalenceReport equivalence_check(const std::vector<int>& widths,
                                           const CriticDataset& data, double p,
                                           double length_scale, double precision,
                                           int trials, Rng& rng,
                                           double lambda_weight_factor = 1.0) {
  if (trials < 3) throw ConfigError("affine fit needs at least three trials");
  GpObjectiveConfig cfg;
  cfg.length_scale = length_scale;
  cfg.precision = precision;
  cfg.dataset_size = data.size();
  cfg.drop_probabilities.assign(widths.size() - 1, p);
  L2Coefficients l2 = cfg.l2();
  for (double& w : l2.weight) w *= lambda_weight_factor;

  std::vector<double> critic_values, gp_values;
  for (int t = 0; t < trials; ++t) {
    MlpParams net = MlpParams::initialized(widths, OutputHead::kLinear, rng);
    for (Index i = 0; i < net.flat().size(); ++i) net.flat()[i] += rng.uniform(-0.5, 0.5);
    const DropoutMask mask = sample_mask(data.size(), hidden_widths(net), p, rng);
    critic_values.push_back(critic_objective(net, data, l2, &mask));
    gp_values.push_back(gp_objective(net, data, cfg, &mask));
  }
  return fit_affine(std::move(critic_values), std::move(gp_values));
}

/// One random architecture of a verification sweep.
struct EquivalenceCase {
  std::vector<int> widths;
  double p = 0.0;
  double length_scale = 1.0;
  double precision = 1.0;
  Index dataset_size = 0;
  double residual = 0.0;          // matched coefficients
  double control_residual = 0.0;  // weight coefficients scaled by the control factor
};

/// Draws `architectures` random critics (1 to 3 hidden layers of 2 to 8
/// units), random regression data, and runs equivalence_check twice per
/// architecture with identical draws: once with the matched coefficients and
/// once with the weight coefficients multiplied by `control_factor`.
inline std::vector<EquivalenceCase> equivalence_sweep(int architectures, int trials,
                                                      std::uint64_t seed,
                                                      double control_factor = 2.0) {
  Rng rng(seed);
  std::vector<EquivalenceCase> cases;
  for (int a = 0; a < architectures; ++a) {
    EquivalenceCase c;
    const int in = 1 + int(rng.index(4));
    const int layers = 1 + int(rng.index(3));
    c.widths.push_back(in);
    for (int l = 0; l < layers; ++l) c.widths.push_back(2 + int(rng.index(7)));
    c.widths.push_back(1);
    c.p = rng.uniform(0.1, 0.6);
    c.length_scale = rng.uniform(1.0, 3.0);
    c.precision = rng.uniform(0.25, 1.0);
    c.dataset_size = 8 + Index(rng.index(17));
    CriticDataset data{MatrixXd(in, c.dataset_size), MatrixXd(1, c.dataset_size)};
    for (Index i = 0; i < data.inputs.size(); ++i) data.inputs.data()[i] = rng.normal();
    for (Index i = 0; i < c.dataset_size; ++i) data.targets(0, i) = rng.normal();
    Rng trial_rng(rng.next_seed());
    Rng control_rng = trial_rng;
    c.residual = equivalence_check(c.widths, data, c.p, c.length_scale, c.precision, trials,
                                   trial_rng)
                     .max_residual;
    c.control_residual = equivalence_check(c.widths, data, c.p, c.length_scale, c.precision,
                                           trials, control_rng, control_factor)
                             .max_residual;
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace mepg
