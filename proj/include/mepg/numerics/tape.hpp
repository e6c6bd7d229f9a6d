#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

class Tape;

/// Scalar recorded on a Tape. Arithmetic on Vars appends nodes; gradients
/// are obtained with Tape::gradient.
class Var {
 public:
  Var() = default;
  double value() const { return value_; }
  long index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, long index, double value)
      : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  long index_ = -1;
  double value_ = 0.0;
};

/// Reverse-mode recording of a scalar computation graph. Each node keeps
/// up to two parents with the local partial derivatives.
class Tape {
 public:
  Var variable(double value) { return push(value, -1, 0.0, -1, 0.0); }

  /// Node with one parent and local derivative d(node)/d(parent).
  Var unary(const Var& a, double value, double da) {
    return push(value, a.index_, da, -1, 0.0);
  }
  Var binary(const Var& a, double da, const Var& b, double db, double value) {
    return push(value, a.index_, da, b.index_, db);
  }

  std::size_t size() const { return nodes_.size(); }

  /// d(loss)/d(node) for every node on the tape. Throws NumericError naming
  /// the first non-finite node that feeds the loss.
  std::vector<double> gradient(const Var& loss) const {
    if (loss.tape_ != this) throw ConfigError("loss was recorded on another tape");
    if (!std::isfinite(loss.value_)) {
      long bad = loss.index_;
      for (long i = 0; i <= loss.index_; ++i) {
        if (!std::isfinite(nodes_[i].value)) {
          bad = i;
          break;
        }
      }
      throw NumericError("non-finite loss; first non-finite node " +
                             std::to_string(bad),
                         bad);
    }
    std::vector<double> adj(nodes_.size(), 0.0);
    adj[loss.index_] = 1.0;
    for (long i = loss.index_; i >= 0; --i) {
      const Node& n = nodes_[i];
      if (adj[i] == 0.0) continue;
      if (n.lhs >= 0) adj[n.lhs] += adj[i] * n.dlhs;
      if (n.rhs >= 0) adj[n.rhs] += adj[i] * n.drhs;
    }
    return adj;
  }

 private:
  struct Node {
    long lhs, rhs;
    double dlhs, drhs;
    double value;
  };

  Var push(double value, long lhs, double dlhs, long rhs, double drhs) {
    nodes_.push_back({lhs, rhs, dlhs, drhs, value});
    return Var(this, long(nodes_.size()) - 1, value);
  }

  std::vector<Node> nodes_;
};

inline Var operator+(const Var& a, const Var& b) {
  return a.tape()->binary(a, 1.0, b, 1.0, a.value() + b.value());
}
inline Var operator-(const Var& a, const Var& b) {
  return a.tape()->binary(a, 1.0, b, -1.0, a.value() - b.value());
}
inline Var operator*(const Var& a, const Var& b) {
  return a.tape()->binary(a, b.value(), b, a.value(), a.value() * b.value());
}
inline Var operator/(const Var& a, const Var& b) {
  const double inv = 1.0 / b.value();
  return a.tape()->binary(a, inv, b, -a.value() * inv * inv, a.value() * inv);
}
inline Var operator-(const Var& a) { return a.tape()->unary(a, -a.value(), -1.0); }
inline Var operator+(const Var& a, double c) { return a.tape()->unary(a, a.value() + c, 1.0); }
inline Var operator+(double c, const Var& a) { return a + c; }
inline Var operator-(const Var& a, double c) { return a.tape()->unary(a, a.value() - c, 1.0); }
inline Var operator-(double c, const Var& a) { return a.tape()->unary(a, c - a.value(), -1.0); }
inline Var operator*(const Var& a, double c) { return a.tape()->unary(a, a.value() * c, c); }
inline Var operator*(double c, const Var& a) { return a * c; }
inline Var operator/(const Var& a, double c) { return a * (1.0 / c); }

inline Var relu(const Var& a) {
  return a.value() > 0.0 ? a.tape()->unary(a, a.value(), 1.0)
                         : a.tape()->unary(a, 0.0, 0.0);
}
inline Var tanh(const Var& a) {
  const double t = std::tanh(a.value());
  return a.tape()->unary(a, t, 1.0 - t * t);
}
inline Var exp(const Var& a) {
  const double e = std::exp(a.value());
  return a.tape()->unary(a, e, e);
}
inline Var log(const Var& a) {
  return a.tape()->unary(a, std::log(a.value()), 1.0 / a.value());
}
inline Var square(const Var& a) {
  return a.tape()->unary(a, a.value() * a.value(), 2.0 * a.value());
}
/// log(1 + exp(a)), evaluated without overflow.
inline Var softplus(const Var& a) {
  const double x = a.value();
  const double v = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return a.tape()->unary(a, v, 1.0 / (1.0 + std::exp(-x)));
}
/// Subgradient picks the left operand on ties.
inline Var min(const Var& a, const Var& b) {
  return a.value() <= b.value() ? a.tape()->unary(a, a.value(), 1.0)
                                : b.tape()->unary(b, b.value(), 1.0);
}
/// Clamp with zero derivative outside [lo, hi].
inline Var clamp(const Var& a, double lo, double hi) {
  if (a.value() < lo) return a.tape()->unary(a, lo, 0.0);
  if (a.value() > hi) return a.tape()->unary(a, hi, 0.0);
  return a.tape()->unary(a, a.value(), 1.0);
}

/// Network parameters registered on a tape, one variable per scalar.
struct TapedMlp {
  const MlpParams* layout = nullptr;
  std::vector<Var> params;

  TapedMlp(Tape& tape, const MlpParams& net) : layout(&net) {
    params.reserve(net.flat().size());
    for (Index i = 0; i < net.flat().size(); ++i) {
      params.push_back(tape.variable(net.flat()[i]));
    }
  }

  std::vector<Var> forward(std::span<const Var> input,
                           std::span<const std::vector<double>> masks = {},
                           double scale = 1.0) const {
    return forward_generic<Var>(*layout, params, input, masks, scale);
  }
  Var log_std(Index j) const { return params[layout->log_std_index(j)]; }
};

/// d(loss)/d(parameter) for every scalar of `net`, returned in the same
/// layout. Parameters the loss does not reach get exactly zero.
inline MlpParams grad(const Var& loss, const TapedMlp& net) {
  const std::vector<double> adj = loss.tape()->gradient(loss);
  MlpParams g = net.layout->zeros_like();
  for (std::size_t i = 0; i < net.params.size(); ++i) {
    g.flat()[Index(i)] = adj[net.params[i].index()];
  }
  return g;
}

}  // namespace mepg
