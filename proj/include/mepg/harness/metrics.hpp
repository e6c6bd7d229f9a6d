#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "mepg/common/error.hpp"

namespace mepg {

struct EvalRecord {
  long step = 0;
  double mean_return = 0.0;
  double std_return = 0.0;

  bool operator==(const EvalRecord&) const = default;
};

/// Periodic evaluation results of one run, in step order.
using EvalSeries = std::vector<EvalRecord>;

/// Average of the five largest evaluation means of one run.
inline double top5_score(const EvalSeries& series) {
  constexpr std::size_t kTop = 5;
  if (series.size() < kTop) {
    throw InsufficientDataError("top-5 metric needs at least 5 evaluations, run has " +
                                std::to_string(series.size()));
  }
  std::vector<double> means;
  means.reserve(series.size());
  for (const auto& r : series) means.push_back(r.mean_return);
  std::partial_sort(means.begin(), means.begin() + kTop, means.end(), std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < kTop; ++i) sum += means[i];
  return sum / double(kTop);
}

/// Per-run top-5 scores averaged across runs.
inline double top5_metric(const std::vector<EvalSeries>& runs) {
  if (runs.empty()) throw InsufficientDataError("top-5 metric needs at least one run");
  double sum = 0.0;
  for (const auto& r : runs) sum += top5_score(r);
  return sum / double(runs.size());
}

/// Divides a column of scores by its maximum. Nonpositive maxima have no
/// meaningful ratio and are rejected.
inline std::map<double, double> normalize_column(const std::map<double, double>& scores) {
  if (scores.empty()) throw InsufficientDataError("nothing to normalize");
  double best = scores.begin()->second;
  for (const auto& [p, v] : scores) best = std::max(best, v);
  if (!(best > 0.0)) {
    throw UnsupportedError("cannot normalize a column whose maximum is not positive");
  }
  std::map<double, double> out;
  for (const auto& [p, v] : scores) out[p] = v / best;
  return out;
}

/// p -> (env -> score) table normalized column by column.
struct NormalizedSweep {
  std::map<double, std::map<std::string, double>> values;
  std::vector<std::string> raw_columns;  // columns left unnormalized
};

inline NormalizedSweep normalize_sweep(
    const std::map<double, std::map<std::string, double>>& scores) {
  if (scores.empty()) throw InsufficientDataError("nothing to normalize");
  std::map<std::string, std::map<double, double>> columns;
  for (const auto& [p, row] : scores) {
    for (const auto& [env, v] : row) columns[env][p] = v;
  }
  NormalizedSweep out;
  for (const auto& [env, col] : columns) {
    std::map<double, double> norm;
    try {
      norm = normalize_column(col);
    } catch (const UnsupportedError&) {
      norm = col;
      out.raw_columns.push_back(env);
    }
    for (const auto& [p, v] : norm) out.values[p][env] = v;
  }
  return out;
}

/// Exponential smoothing y'_0 = y_0, y'_k = f y'_{k-1} + (1 - f) y_k.
/// Plot-only; metrics are always computed on raw values.
inline std::vector<double> smooth(const std::vector<double>& ys, double factor) {
  if (!(factor >= 0.0 && factor < 1.0)) throw ConfigError("smoothing factor must lie in [0, 1)");
  std::vector<double> out;
  out.reserve(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    out.push_back(k == 0 ? ys[0] : factor * out[k - 1] + (1.0 - factor) * ys[k]);
  }
  return out;
}

}  // namespace mepg
