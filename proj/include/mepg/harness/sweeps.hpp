#pragma once

#include <map>
#include <string>
#include <vector>

#include "mepg/harness/experiment.hpp"

namespace mepg {

/// Top-5 scores for every (p, env) cell.
struct SweepResult {
  std::map<double, std::map<std::string, double>> scores;
  NormalizedSweep normalized;
};

/// Runs `base` once per drop probability and env. Raw and normalized
/// heatmaps go to sweep_<algo>_raw.csv and sweep_<algo>_normalized.csv.
inline SweepResult sweep_p(const ExperimentConfig& base, const std::vector<double>& values,
                           const std::vector<std::string>& envs) {
  if (values.empty() || envs.empty()) throw ConfigError("sweep needs p values and envs");
  SweepResult out;
  for (const auto& env : envs) {
    for (double p : values) {
      ExperimentConfig c = base;
      c.env = env;
      c.agent.drop_probability = p;
      c.output_dir = base.output_dir / ("p" + format_double(p));
      out.scores[p][env] = run_experiment(c).aggregate.mean;
    }
  }
  out.normalized = normalize_sweep(out.scores);
  const std::string stem = "sweep_" + base.label();
  write_text(base.output_dir / (stem + "_raw.csv"), table_csv(out.scores));
  write_text(base.output_dir / (stem + "_normalized.csv"), table_csv(out.normalized.values));
  return out;
}

struct AblationRow {
  std::string variant;
  double score = 0.0;
  std::size_t parameter_count = 0;
  double wall_seconds = 0.0;
};

/// Runs every ablation variant of `algo`. Scores go to
/// ablation_<algo>_<env>.csv; wall-clock relative to the plain baseline
/// (last variant) goes to ablation_<algo>_<env>_timing.csv.
inline std::vector<AblationRow> ablate(const ExperimentConfig& base, const std::string& algo) {
  std::vector<AblationRow> rows;
  for (const auto& name : ablation_names(algo)) {
    ExperimentConfig c = base;
    c.algorithm = name;
    c.toggles.clear();
    const ExperimentResult r = run_experiment(c);
    rows.push_back({name, r.aggregate.mean, r.runs.front().parameter_count, r.mean_wall_seconds()});
  }
  const std::string stem = "ablation_" + internal::lower(algo) + "_" + base.env;
  std::string scores = "variant,top5_score,parameter_count\n";
  std::string timing = "variant,wall_seconds,relative_wall_clock\n";
  const double reference = rows.back().wall_seconds;
  for (const auto& r : rows) {
    scores += r.variant + ',' + format_double(r.score) + ',' + std::to_string(r.parameter_count) + '\n';
    timing += r.variant + ',' + format_double(r.wall_seconds) + ',' +
              format_double(reference > 0.0 ? r.wall_seconds / reference : 0.0) + '\n';
  }
  write_text(base.output_dir / (stem + ".csv"), scores);
  write_text(base.output_dir / (stem + "_timing.csv"), timing);
  return rows;
}

}  // namespace mepg
