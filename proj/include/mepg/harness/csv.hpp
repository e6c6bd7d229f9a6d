#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/harness/metrics.hpp"

namespace mepg {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw NumericError("cannot format number", -1);
  return std::string(buf.data(), end);
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw IoError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline long parse_long(std::string_view text) {
  long v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw IoError("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot write " + path.string() + ": cannot create " +
                    path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline constexpr std::string_view kSeriesHeader = "step,mean_return,std_return";
inline constexpr std::string_view kAggregateHeader = "run_seed,top5_score";

inline std::string series_csv(const EvalSeries& series) {
  std::string out(kSeriesHeader);
  out += '\n';
  for (const auto& r : series) {
    out += std::to_string(r.step) + ',' + format_double(r.mean_return) + ',' +
           format_double(r.std_return) + '\n';
  }
  return out;
}

inline EvalSeries parse_series_csv(std::string_view text, const std::string& origin = "csv") {
  EvalSeries series;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line != kSeriesHeader) throw IoError(origin + ": unexpected header");
      header = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw IoError(origin + ": expected 3 columns");
    series.push_back({parse_long(cells[0]), parse_double(cells[1]), parse_double(cells[2])});
  }
  if (header) throw IoError(origin + ": empty file");
  return series;
}

inline EvalSeries read_series_csv(const std::filesystem::path& path) {
  return parse_series_csv(read_text(path), path.string());
}

/// Per-seed top-5 scores and their mean.
struct AggregateScores {
  std::vector<std::pair<std::uint64_t, double>> runs;
  double mean = 0.0;
};

inline AggregateScores aggregate_scores(const std::vector<std::uint64_t>& seeds,
                                        const std::vector<EvalSeries>& runs) {
  if (seeds.size() != runs.size()) throw ConfigError("one series per seed expected");
  AggregateScores a;
  for (std::size_t i = 0; i < runs.size(); ++i) a.runs.emplace_back(seeds[i], top5_score(runs[i]));
  a.mean = top5_metric(runs);
  return a;
}

inline std::string aggregate_csv(const AggregateScores& a) {
  std::string out(kAggregateHeader);
  out += '\n';
  for (const auto& [seed, score] : a.runs) {
    out += std::to_string(seed) + ',' + format_double(score) + '\n';
  }
  out += "mean," + format_double(a.mean) + '\n';
  return out;
}

inline AggregateScores parse_aggregate_csv(std::string_view text,
                                           const std::string& origin = "csv") {
  AggregateScores a;
  bool header = true, have_mean = false;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    if (header) {
      if (line != kAggregateHeader) throw IoError(origin + ": unexpected header");
      header = false;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw IoError(origin + ": expected 2 columns");
    if (cells[0] == "mean") {
      a.mean = parse_double(cells[1]);
      have_mean = true;
    } else {
      a.runs.emplace_back(std::uint64_t(parse_long(cells[0])), parse_double(cells[1]));
    }
  }
  if (!have_mean) throw IoError(origin + ": missing mean row");
  return a;
}

/// Heatmap layout: one row per p, one column per env.
inline std::string table_csv(const std::map<double, std::map<std::string, double>>& table,
                             std::string_view corner = "p") {
  std::vector<std::string> envs;
  for (const auto& [p, row] : table) {
    for (const auto& [env, v] : row) {
      if (std::find(envs.begin(), envs.end(), env) == envs.end()) envs.push_back(env);
    }
  }
  std::sort(envs.begin(), envs.end());
  std::string out(corner);
  for (const auto& e : envs) out += ',' + e;
  out += '\n';
  for (const auto& [p, row] : table) {
    out += format_double(p);
    for (const auto& e : envs) {
      out += ',';
      if (auto it = row.find(e); it != row.end()) out += format_double(it->second);
    }
    out += '\n';
  }
  return out;
}

}  // namespace mepg
