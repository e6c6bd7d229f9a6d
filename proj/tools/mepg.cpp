// Command-line front end: train, sweep-p, ablate, report, verify-gp, params.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mepg/mepg.hpp"

namespace {

using namespace mepg;

/// Flags shared by the commands that train agents.
struct TrainFlags {
  std::string profile = "desk";
  std::string config_file;
  std::optional<std::string> algo, env, out, seeds;
  std::optional<long> steps, eval_interval;
  std::optional<double> p;
  std::vector<std::string> toggles;
  std::optional<int> workers;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd, bool with_algo_env) {
    cmd->add_option("--profile", profile, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    cmd->add_option("--config", config_file, "key=value settings file");
    if (with_algo_env) {
      cmd->add_option("--algo", algo, "ddpg, td3, me-ddpg, sac, me-sac or an ablation name");
      cmd->add_option("--env", env, "pendulum, double-integrator, reacher2d");
    }
    cmd->add_option("--seeds", seeds, "comma-separated seeds");
    cmd->add_option("--steps", steps, "training steps per run");
    cmd->add_option("--eval-interval", eval_interval, "steps between evaluations");
    cmd->add_option("--p", p, "dropout probability");
    cmd->add_option("--toggle", toggles, "+cdq, -tps, -du, -do, +fixent")->allow_extra_args(false);
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--workers", workers, "parallel runs (0: all cores)");
    cmd->add_option("--set", sets, "extra key=value setting")->allow_extra_args(false);
  }

  /// Profile, then file, then flags.
  ExperimentConfig build() const {
    ExperimentConfig c = mepg::profile(profile);
    if (!config_file.empty()) apply_config_file(c, config_file);
    if (algo) c.algorithm = *algo;
    if (env) c.env = *env;
    if (seeds) set_option(c, "seeds", *seeds);
    if (steps) c.total_steps = *steps;
    if (eval_interval) c.eval_interval = *eval_interval;
    if (p) c.agent.drop_probability = *p;
    if (!toggles.empty()) c.toggles = toggles;
    if (out) c.output_dir = *out;
    if (workers) c.workers = *workers;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value");
      set_option(c, s.substr(0, eq), s.substr(eq + 1));
    }
    c.validate();
    return c;
  }
};

void print_experiment(const ExperimentResult& r) {
  std::printf("%s\n", r.label.c_str());
  for (const auto& [seed, score] : r.aggregate.runs) {
    std::printf("  seed %llu  top5 %.3f\n", static_cast<unsigned long long>(seed), score);
  }
  std::printf("  mean top5 %.3f  params %zu  wall %.1fs/run\n", r.aggregate.mean,
              r.runs.front().parameter_count, r.mean_wall_seconds());
  std::printf("  wrote %s\n", r.aggregate_path.string().c_str());
}

int cmd_report(const std::string& dir) {
  const auto files = find_aggregates(dir);
  if (files.empty()) {
    std::fprintf(stderr, "no aggregate files in %s\n", dir.c_str());
    return 1;
  }
  bool all_match = true;
  std::printf("%-40s %14s %s\n", "experiment", "top5", "recomputed");
  for (const auto& f : files) {
    const RecomputedAggregate r = recompute_aggregate(f);
    all_match = all_match && r.matches();
    std::string name = f.filename().string();
    name.resize(name.size() - std::string("_aggregate.csv").size());
    std::printf("%-40s %14.3f %s\n", name.c_str(), r.scores.mean,
                r.matches() ? "identical" : "DIFFERS");
  }
  return all_match ? 0 : 2;
}

int cmd_verify_gp(int architectures, int trials, std::uint64_t seed, const std::string& csv) {
  const std::vector<EquivalenceCase> cases = equivalence_sweep(architectures, trials, seed);
  std::string out = "architecture,p,length_scale,precision,dataset_size,max_residual,control_residual\n";
  double worst = 0.0, weakest_control = 1e300;
  for (const EquivalenceCase& c : cases) {
    worst = std::max(worst, c.residual);
    weakest_control = std::min(weakest_control, c.control_residual);
    std::string arch;
    for (std::size_t i = 0; i < c.widths.size(); ++i) {
      arch += (i ? "x" : "") + std::to_string(c.widths[i]);
    }
    out += arch + ',' + format_double(c.p) + ',' + format_double(c.length_scale) + ',' +
           format_double(c.precision) + ',' + std::to_string(c.dataset_size) + ',' +
           format_double(c.residual) + ',' + format_double(c.control_residual) + '\n';
  }
  std::printf("architectures checked: %d (%d trials each)\n", architectures, trials);
  std::printf("largest affine residual:           %.3e\n", worst);
  std::printf("smallest residual with lambda_W x2: %.3e\n", weakest_control);
  const bool ok = worst < 1e-10 && weakest_control > 1e-3;
  std::printf("equivalence %s\n", ok ? "holds" : "FAILED");
  if (!csv.empty()) write_text(csv, out);
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dropout-ensemble actor-critic laboratory"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "train one algorithm on one env over seeds");
  train_flags.attach(train, true);

  TrainFlags sweep_flags;
  std::string sweep_values = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95";
  std::string sweep_envs = "double-integrator,pendulum,reacher2d";
  auto* sweep = app.add_subcommand("sweep-p", "dropout probability sensitivity grid");
  sweep_flags.attach(sweep, true);
  sweep->add_option("--values", sweep_values, "comma-separated p values");
  sweep->add_option("--envs", sweep_envs, "comma-separated envs");

  TrainFlags ablate_flags;
  auto* abl = app.add_subcommand("ablate", "run every ablation variant of an algorithm");
  ablate_flags.attach(abl, true);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "recompute metrics from stored CSVs");
  report->add_option("--in", report_dir, "directory with run CSVs")->required();

  int gp_archs = 20, gp_trials = 6;
  std::uint64_t gp_seed = 7;
  std::string gp_csv;
  auto* gp = app.add_subcommand("verify-gp", "check the critic/deep-GP objective equivalence");
  gp->add_option("--architectures", gp_archs, "random architectures")->check(CLI::PositiveNumber);
  gp->add_option("--trials", gp_trials, "parameter draws per architecture")->check(CLI::Range(3, 1000));
  gp->add_option("--seed", gp_seed, "seed");
  gp->add_option("--csv", gp_csv, "write per-architecture residuals here");

  std::vector<int> param_hidden = {256, 256};
  auto* params = app.add_subcommand("params", "parameter counts per algorithm and task");
  params->add_option("--hidden", param_hidden, "hidden widths")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      print_experiment(run_experiment(train_flags.build()));
      return 0;
    }
    if (sweep->parsed()) {
      ExperimentConfig base = sweep_flags.build();
      if (!sweep_flags.algo) base.algorithm = "me-ddpg";
      std::vector<double> values;
      for (auto v : split(sweep_values, ',')) values.push_back(parse_double(v));
      std::vector<std::string> envs;
      for (auto e : split(sweep_envs, ',')) envs.emplace_back(e);
      const SweepResult r = sweep_p(base, values, envs);
      std::cout << "raw top-5 scores\n" << table_csv(r.scores);
      for (const auto& e : r.normalized.raw_columns) {
        std::cout << "note: column " << e << " has a nonpositive maximum and is left unnormalized\n";
      }
      std::cout << "normalized\n" << table_csv(r.normalized.values);
      return 0;
    }
    if (abl->parsed()) {
      const ExperimentConfig base = ablate_flags.build();
      const auto rows = ablate(base, base.algorithm);
      const double reference = rows.back().wall_seconds;
      std::printf("%-14s %14s %10s %10s\n", "variant", "top5", "params", "rel.time");
      for (const auto& r : rows) {
        std::printf("%-14s %14.3f %10zu %10.2f\n", r.variant.c_str(), r.score, r.parameter_count,
                    reference > 0 ? r.wall_seconds / reference : 0.0);
      }
      return 0;
    }
    if (report->parsed()) return cmd_report(report_dir);
    if (gp->parsed()) return cmd_verify_gp(gp_archs, gp_trials, gp_seed, gp_csv);
    if (params->parsed()) {
      std::cout << parameter_table_csv(param_hidden);
      return 0;
    }
  } catch (const mepg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
