#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mepg/agents/config.hpp"
#include "mepg/harness/csv.hpp"

namespace mepg {

/// One algorithm on one environment over several seeds.
struct ExperimentConfig {
  std::string algorithm = "me-ddpg";
  std::string env = "double-integrator";
  long total_steps = 100000;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  long eval_interval = 5000;
  int eval_episodes = 10;
  AgentConfig agent;
  std::vector<std::string> toggles;
  std::filesystem::path output_dir = "runs";
  double smoothing = 0.6;
  bool plot = true;
  int workers = 0;  // 0: one per hardware thread

  void validate() const {
    if (total_steps < 1 || eval_interval < 1 || eval_episodes < 1) {
      throw ConfigError("steps, eval interval and eval episodes must be positive");
    }
    if (total_steps < eval_interval) throw ConfigError("total steps must be >= eval interval");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ConfigError("smoothing must lie in [0, 1)");
    if (workers < 0) throw ConfigError("workers must be >= 0");
    agent.validate();
  }

  /// Name of the resolved algorithm, toggles appended.
  std::string label() const {
    std::string out = algorithm;
    for (const auto& t : toggles) out += t;
    return out;
  }

  AgentRecipe recipe() const {
    AgentRecipe r = resolve_agent(algorithm, agent);
    for (const auto& t : toggles) apply_toggle(r.config, t);
    r.config.validate();
    return r;
  }
};

/// Published full-scale settings: 256x256 networks, 10^6 steps, 5 seeds.
inline ExperimentConfig full_profile() {
  ExperimentConfig c;
  c.total_steps = 1000000;
  c.seeds = {0, 1, 2, 3, 4};
  c.eval_interval = 5000;
  return c;
}

/// Reduced settings that finish in minutes on one CPU.
inline ExperimentConfig desk_profile() {
  ExperimentConfig c;
  c.total_steps = 100000;
  c.seeds = {0, 1, 2};
  c.eval_interval = 2500;
  c.agent.hidden = {64, 64};
  c.agent.batch_size = 100;
  c.agent.random_start_steps = 5000;
  c.agent.buffer_capacity = 100000;
  return c;
}

inline ExperimentConfig profile(std::string_view name) {
  if (name == "desk") return desk_profile();
  if (name == "full") return full_profile();
  throw ConfigError("unknown profile '" + std::string(name) + "'");
}

namespace internal {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
std::vector<T> parse_list(std::string_view text, T (*parse)(std::string_view)) {
  std::vector<T> out;
  for (std::string_view cell : split(text, ',')) {
    const std::string t = trim(cell);
    if (!t.empty()) out.push_back(parse(t));
  }
  return out;
}

inline bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("not a boolean: '" + std::string(v) + "'");
}

inline double number(std::string_view v) {
  try {
    return parse_double(v);
  } catch (const IoError&) {
    throw ConfigError("not a number: '" + std::string(v) + "'");
  }
}

inline long integer(std::string_view v) {
  try {
    return parse_long(v);
  } catch (const IoError&) {
    throw ConfigError("not an integer: '" + std::string(v) + "'");
  }
}

inline std::uint64_t seed_value(std::string_view v) { return std::uint64_t(integer(v)); }
inline int int_value(std::string_view v) { return int(integer(v)); }

}  // namespace internal

/// Applies one key=value setting. Keys follow the hyper-parameter table
/// wording in snake case; a few short aliases are accepted.
inline void set_option(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  using namespace internal;
  const std::string k = lower(trim(key));
  const std::string v = trim(raw);
  AgentConfig& a = c.agent;
  if (k == "algorithm" || k == "algo") {
    c.algorithm = v;
  } else if (k == "env" || k == "environment") {
    c.env = v;
  } else if (k == "total_steps" || k == "steps") {
    c.total_steps = integer(v);
  } else if (k == "seeds") {
    c.seeds = parse_list<std::uint64_t>(v, seed_value);
  } else if (k == "eval_interval") {
    c.eval_interval = integer(v);
  } else if (k == "eval_episodes") {
    c.eval_episodes = int(integer(v));
  } else if (k == "output_dir" || k == "out") {
    c.output_dir = v;
  } else if (k == "toggles" || k == "toggle") {
    c.toggles.clear();
    for (std::string_view t : split(v, ',')) {
      if (!trim(t).empty()) c.toggles.push_back(trim(t));
    }
  } else if (k == "smoothing") {
    c.smoothing = number(v);
  } else if (k == "plot") {
    c.plot = parse_bool(v);
  } else if (k == "workers") {
    c.workers = int(integer(v));
  } else if (k == "discount") {
    a.discount = number(v);
  } else if (k == "replay_buffer_size") {
    a.buffer_capacity = integer(v);
  } else if (k == "learning_rate_for_actor" || k == "actor_lr") {
    a.actor_lr = number(v);
  } else if (k == "learning_rate_for_critic" || k == "critic_lr") {
    a.critic_lr = number(v);
  } else if (k == "learning_rate_for_alpha" || k == "alpha_lr") {
    a.alpha_lr = number(v);
  } else if (k == "number_of_hidden_layers") {
    const int width = a.hidden.empty() ? 256 : a.hidden.front();
    a.hidden.assign(std::size_t(integer(v)), width);
  } else if (k == "number_of_hidden_units_per_layer") {
    const std::size_t layers = a.hidden.empty() ? 2 : a.hidden.size();
    a.hidden.assign(layers, int(integer(v)));
  } else if (k == "hidden") {
    a.hidden = parse_list<int>(v, int_value);
  } else if (k == "mini_batch_size" || k == "batch_size") {
    a.batch_size = int(integer(v));
  } else if (k == "random_starting_exploration_time_steps" || k == "random_start_steps") {
    a.random_start_steps = integer(v);
  } else if (k == "target_smoothing_coefficient" || k == "eta") {
    a.target_mix = number(v);
  } else if (k == "target_update_interval" || k == "delayed_policy_update_frequency" ||
             k == "policy_delay") {
    a.policy_delay = int(integer(v));
  } else if (k == "variance_of_exploration_noise" || k == "exploration_noise") {
    a.exploration_noise = number(v);
  } else if (k == "variance_of_target_policy_smoothing" || k == "target_noise") {
    a.target_noise = number(v);
  } else if (k == "noise_clip_range" || k == "noise_clip") {
    a.noise_clip = number(v);
  } else if (k == "dropout_probability" || k == "p") {
    a.drop_probability = number(v);
  } else if (k == "target_entropy") {
    if (v == "auto" || v.empty()) {
      a.target_entropy.reset();
    } else {
      a.target_entropy = number(v);
    }
  } else if (k == "initial_alpha") {
    a.initial_alpha = number(v);
  } else if (k == "fixed_alpha") {
    a.fixed_alpha_value = number(v);
  } else {
    throw ConfigError("unknown setting '" + std::string(key) + "'");
  }
}

/// Flat key=value text; '#' starts a comment.
inline void apply_config_text(ExperimentConfig& c, std::string_view text) {
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    if (internal::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    set_option(c, line.substr(0, eq), line.substr(eq + 1));
  }
}

inline void apply_config_file(ExperimentConfig& c, const std::filesystem::path& path) {
  try {
    apply_config_text(c, read_text(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace mepg
