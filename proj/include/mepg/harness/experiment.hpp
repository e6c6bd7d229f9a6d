#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mepg/agents/train_step.hpp"
#include "mepg/envs/registry.hpp"
#include "mepg/harness/csv.hpp"
#include "mepg/harness/evaluate.hpp"
#include "mepg/harness/experiment_config.hpp"
#include "mepg/harness/metrics.hpp"
#include "mepg/harness/svg.hpp"

namespace mepg {

/// Outcome of one seed.
struct RunResult {
  std::uint64_t seed = 0;
  EvalSeries series;
  std::size_t parameter_count = 0;
  double wall_seconds = 0.0;
  long episodes = 0;
};

/// Trains one seed for config.total_steps, evaluating after every
/// config.eval_interval-th step.
inline RunResult run_single(const ExperimentConfig& config, std::uint64_t seed) {
  const AgentRecipe recipe = config.recipe();
  const auto start = std::chrono::steady_clock::now();
  TrainingState state = TrainingState::create(recipe, make_env(config.env), seed);
  const std::unique_ptr<Env> eval_env = make_env(config.env);
  RunResult out;
  out.seed = seed;
  out.parameter_count = state.agent->parameter_count();
  while (state.step < config.total_steps) {
    const StepReport r = train_step(state);
    if (r.episode_return) ++out.episodes;
    if (state.step % config.eval_interval == 0) {
      const EvalResult e = evaluate(*state.agent, *eval_env, config.eval_episodes,
                                    state.streams.eval.next_seed());
      out.series.push_back({state.step, e.mean, e.std});
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads (0: hardware
/// concurrency). The first exception is rethrown after all workers stop.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  std::size_t threads = workers > 0 ? std::size_t(workers)
                                    : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Runs of one config and the files written for them.
struct ExperimentResult {
  std::string label;
  std::vector<RunResult> runs;
  AggregateScores aggregate;
  std::filesystem::path aggregate_path;

  std::vector<EvalSeries> series() const {
    std::vector<EvalSeries> out;
    for (const auto& r : runs) out.push_back(r.series);
    return out;
  }
  double mean_wall_seconds() const {
    double s = 0.0;
    for (const auto& r : runs) s += r.wall_seconds;
    return runs.empty() ? 0.0 : s / double(runs.size());
  }
};

/// File prefix shared by the artifacts of one experiment.
inline std::string artifact_prefix(const ExperimentConfig& c) { return c.label() + "_" + c.env; }

inline std::filesystem::path seed_csv_path(const std::filesystem::path& dir,
                                           const std::string& prefix, std::uint64_t seed) {
  return dir / (prefix + "_seed" + std::to_string(seed) + ".csv");
}

inline std::string timing_csv(const ExperimentResult& r) {
  std::string out = "run_seed,parameter_count,wall_seconds,episodes\n";
  for (const auto& run : r.runs) {
    out += std::to_string(run.seed) + ',' + std::to_string(run.parameter_count) + ',' +
           format_double(run.wall_seconds) + ',' + std::to_string(run.episodes) + '\n';
  }
  return out;
}

/// Trains every seed (in parallel when allowed), then writes
///   <prefix>_seed<k>.csv    step,mean_return,std_return
///   <prefix>_aggregate.csv  run_seed,top5_score + mean row
///   <prefix>_timing.csv     parameter count and wall-clock per seed
///   <prefix>.svg            learning curve (when config.plot)
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  (void)config.recipe();  // fail on bad names before any thread starts
  ExperimentResult result;
  result.label = config.label();
  result.runs.resize(config.seeds.size());
  parallel_for(config.seeds.size(), config.workers,
               [&](std::size_t i) { result.runs[i] = run_single(config, config.seeds[i]); });

  const std::string prefix = artifact_prefix(config);
  const auto& dir = config.output_dir;
  for (const auto& run : result.runs) {
    write_text(seed_csv_path(dir, prefix, run.seed), series_csv(run.series));
  }
  result.aggregate = aggregate_scores(config.seeds, result.series());
  result.aggregate_path = dir / (prefix + "_aggregate.csv");
  write_text(result.aggregate_path, aggregate_csv(result.aggregate));
  write_text(dir / (prefix + "_timing.csv"), timing_csv(result));
  if (config.plot) {
    const Curve c = curve_from_runs(result.label, result.series());
    write_text(dir / (prefix + ".svg"),
               plot_svg({c}, config.smoothing, result.label + " on " + config.env));
  }
  return result;
}

/// Recomputes an aggregate file from the per-seed CSVs beside it.
struct RecomputedAggregate {
  std::filesystem::path aggregate_path;
  std::string stored;
  std::string recomputed;
  AggregateScores scores;
  bool matches() const { return stored == recomputed; }
};

inline RecomputedAggregate recompute_aggregate(const std::filesystem::path& aggregate_path) {
  const std::string name = aggregate_path.filename().string();
  const std::string suffix = "_aggregate.csv";
  if (name.size() <= suffix.size() || name.substr(name.size() - suffix.size()) != suffix) {
    throw IoError(aggregate_path.string() + ": not an aggregate file");
  }
  const std::string prefix = name.substr(0, name.size() - suffix.size());
  RecomputedAggregate r;
  r.aggregate_path = aggregate_path;
  r.stored = read_text(aggregate_path);
  const AggregateScores stored = parse_aggregate_csv(r.stored, aggregate_path.string());
  std::vector<std::uint64_t> seeds;
  std::vector<EvalSeries> runs;
  for (const auto& [seed, score] : stored.runs) {
    seeds.push_back(seed);
    runs.push_back(read_series_csv(seed_csv_path(aggregate_path.parent_path(), prefix, seed)));
  }
  r.scores = aggregate_scores(seeds, runs);
  r.recomputed = aggregate_csv(r.scores);
  return r;
}

/// Every aggregate file in `dir`, sorted by name.
inline std::vector<std::filesystem::path> find_aggregates(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
    const std::string n = e.path().filename().string();
    if (n.size() > 14 && n.substr(n.size() - 14) == "_aggregate.csv") out.push_back(e.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mepg
