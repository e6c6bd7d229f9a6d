#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mepg/harness/metrics.hpp"

namespace mepg {

/// One algorithm's learning curve: cross-seed mean and spread per eval step.
struct Curve {
  std::string label;
  std::vector<long> steps;
  std::vector<double> mean;
  std::vector<double> spread;  // cross-seed standard deviation
};

/// Cross-seed statistics of runs sharing one eval schedule.
inline Curve curve_from_runs(std::string label, const std::vector<EvalSeries>& runs) {
  if (runs.empty()) throw InsufficientDataError("no runs to plot");
  Curve c;
  c.label = std::move(label);
  const std::size_t n = runs.front().size();
  for (const auto& r : runs) {
    if (r.size() != n) throw ConfigError("runs have different eval schedules");
  }
  for (std::size_t k = 0; k < n; ++k) {
    double m = 0.0;
    for (const auto& r : runs) m += r[k].mean_return;
    m /= double(runs.size());
    double v = 0.0;
    for (const auto& r : runs) v += (r[k].mean_return - m) * (r[k].mean_return - m);
    c.steps.push_back(runs.front()[k].step);
    c.mean.push_back(m);
    c.spread.push_back(std::sqrt(v / double(runs.size())));
  }
  return c;
}

namespace internal {

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string compact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace internal

/// Line plot with a shaded band of half a standard deviation around each
/// smoothed mean. Smoothing is applied here only.
inline std::string plot_svg(const std::vector<Curve>& curves, double smoothing,
                            const std::string& title) {
  using internal::compact;
  using internal::fixed;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  const double width = 640, height = 400, left = 70, right = 160, top = 40, bottom = 50;
  double x_max = 1, y_min = 0, y_max = 0;
  bool first = true;
  std::vector<std::vector<double>> lo(curves.size()), hi(curves.size()), mid(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const Curve& cv = curves[c];
    mid[c] = smooth(cv.mean, smoothing);
    std::vector<double> a, b;
    for (std::size_t k = 0; k < cv.mean.size(); ++k) {
      a.push_back(cv.mean[k] - 0.5 * cv.spread[k]);
      b.push_back(cv.mean[k] + 0.5 * cv.spread[k]);
    }
    lo[c] = smooth(a, smoothing);
    hi[c] = smooth(b, smoothing);
    for (std::size_t k = 0; k < cv.steps.size(); ++k) {
      x_max = std::max(x_max, double(cv.steps[k]));
      if (first) {
        y_min = lo[c][k];
        y_max = hi[c][k];
        first = false;
      }
      y_min = std::min(y_min, lo[c][k]);
      y_max = std::max(y_max, hi[c][k]);
    }
  }
  if (y_max - y_min < 1e-9) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + pw * x / x_max; };
  auto py = [&](double y) { return top + ph * (1.0 - (y - y_min) / (y_max - y_min)); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) +
                  "\" height=\"" + fixed(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed(left) + "\" y=\"24\" font-size=\"14\">" + title + "</text>\n";
  s += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(pw) +
       "\" height=\"" + fixed(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = y_min + (y_max - y_min) * t / 4.0;
    const double xv = x_max * t / 4.0;
    s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py(yv) + 4) +
         "\" text-anchor=\"end\">" + compact(yv) + "</text>\n";
    s += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(top + ph + 18) +
         "\" text-anchor=\"middle\">" + compact(xv) + "</text>\n";
  }
  s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 10) +
       "\" text-anchor=\"middle\">steps</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const std::string color = kColors[c % (sizeof kColors / sizeof *kColors)];
    const Curve& cv = curves[c];
    if (cv.steps.empty()) continue;
    std::string band, line;
    for (std::size_t k = 0; k < cv.steps.size(); ++k) {
      band += fixed(px(double(cv.steps[k]))) + ',' + fixed(py(hi[c][k])) + ' ';
      line += fixed(px(double(cv.steps[k]))) + ',' + fixed(py(mid[c][k])) + ' ';
    }
    for (std::size_t k = cv.steps.size(); k-- > 0;) {
      band += fixed(px(double(cv.steps[k]))) + ',' + fixed(py(lo[c][k])) + ' ';
    }
    s += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    s += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    const double ly = top + 16 + 18 * double(c);
    s += "<line x1=\"" + fixed(left + pw + 10) + "\" y1=\"" + fixed(ly - 4) + "\" x2=\"" +
         fixed(left + pw + 30) + "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fixed(left + pw + 36) + "\" y=\"" + fixed(ly) + "\">" + cv.label + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace mepg
