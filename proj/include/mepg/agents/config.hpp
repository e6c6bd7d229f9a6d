#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mepg/common/error.hpp"
#include "mepg/dropout/dropout.hpp"
#include "mepg/numerics/mlp.hpp"

namespace mepg {

/// Deterministic actors (DDPG family) or squashed-Gaussian actors (SAC family).
enum class AgentFamily { kDeterministic, kStochastic };

/// Hyper-parameters and ablation switches. Defaults are the full-scale
/// settings (two hidden layers of 256 units, batch 256, 25k random steps).
struct AgentConfig {
  double discount = 0.99;
  double target_mix = 0.005;
  int policy_delay = 2;
  double exploration_noise = 0.2;  // fraction of the action half-range
  double target_noise = 0.2;       // fraction of the action half-range
  double noise_clip = 0.5;         // fraction of the action half-range
  double drop_probability = 0.1;
  int batch_size = 256;
  Index buffer_capacity = 1000000;
  long random_start_steps = 25000;
  std::vector<int> hidden = {256, 256};
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha_lr = 1e-4;
  std::optional<double> target_entropy;  // defaults to -action_dim
  double initial_alpha = 0.1;
  double fixed_alpha_value = 0.2;
  double log_std_min = -20.0;
  double log_std_max = 2.0;

  bool use_dropout = true;
  bool use_cdq = false;
  bool use_tps = true;
  bool use_delay = true;
  bool auto_entropy = true;

  /// Hidden layers carrying the critic mask; empty means all of them.
  std::vector<int> masked_layers;
  MaskSharing mask_sharing = MaskSharing::kPerSample;
  /// true: y = r + g (Q' - a log pi). false: y = r + g Q' - a log pi.
  bool discount_entropy_term = true;
  /// Keep a copy of the last critic update's inputs for inspection.
  bool record_trace = false;

  double resolved_target_entropy(int action_dim) const {
    return target_entropy.value_or(-double(action_dim));
  }

  void validate() const {
    auto positive = [](double v) { return v > 0.0; };
    if (!positive(actor_lr) || !positive(critic_lr) || !positive(alpha_lr) ||
        !positive(target_mix) || target_mix > 1.0) {
      throw ConfigError("learning rates and target mix must be positive (mix <= 1)");
    }
    if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("discount must lie in [0, 1]");
    if (policy_delay < 1) throw ConfigError("policy delay must be >= 1");
    if (!(drop_probability >= 0.0 && drop_probability < 1.0)) {
      throw ConfigError("drop probability must lie in [0, 1)");
    }
    if (exploration_noise < 0.0 || target_noise < 0.0 || noise_clip < 0.0) {
      throw ConfigError("noise scales must be non-negative");
    }
    if (batch_size < 1 || buffer_capacity < 1 || random_start_steps < 0) {
      throw ConfigError("batch size, capacity and random start must be positive");
    }
    if (hidden.empty()) throw ConfigError("at least one hidden layer is required");
    for (int w : hidden) {
      if (w < 1) throw ConfigError("hidden widths must be positive");
    }
    if (!(initial_alpha > 0.0) || !(fixed_alpha_value > 0.0)) {
      throw ConfigError("temperature must be positive");
    }
    for (int l : masked_layers) {
      if (l < 0 || l >= int(hidden.size())) throw ConfigError("masked layer out of range");
    }
  }
};

/// An algorithm name resolved to its family and switch settings.
struct AgentRecipe {
  std::string name;
  AgentFamily family = AgentFamily::kDeterministic;
  AgentConfig config;
};

namespace internal {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace internal

/// Applies one toggle such as "+cdq", "-tps", "-du", "-do", "+fixent".
inline void apply_toggle(AgentConfig& cfg, std::string_view toggle) {
  const std::string t = internal::lower(toggle);
  if (t.size() < 2 || (t[0] != '+' && t[0] != '-')) {
    throw ConfigError("toggle must start with + or -: " + std::string(toggle));
  }
  const bool on = t[0] == '+';
  const std::string what = t.substr(1);
  if (what == "cdq" || what == "cqd") {
    cfg.use_cdq = on;
  } else if (what == "tps") {
    cfg.use_tps = on;
  } else if (what == "du") {
    cfg.use_delay = on;
  } else if (what == "do") {
    cfg.use_dropout = on;
  } else if (what == "fixent") {
    cfg.auto_entropy = !on;
  } else {
    throw ConfigError("unknown toggle " + std::string(toggle));
  }
}

/// Resolves "ddpg", "td3", "me-ddpg", "sac", "me-sac" and the ablation
/// names (ME+CDQ, MED-DO, MED-DU, MED-TPS, MES+CQD, MES-DU, MES+FIXENT, ...).
/// `base` supplies the non-switch hyper-parameters.
inline AgentRecipe resolve_agent(std::string_view name, AgentConfig base = {}) {
  const std::string n = internal::lower(name);
  AgentRecipe r;
  r.name = std::string(name);
  r.config = base;
  AgentConfig& c = r.config;
  auto deterministic = [&](bool dropout, bool cdq, bool tps, bool delay) {
    r.family = AgentFamily::kDeterministic;
    c.use_dropout = dropout;
    c.use_cdq = cdq;
    c.use_tps = tps;
    c.use_delay = delay;
  };
  auto stochastic = [&](bool dropout, bool cdq, bool delay) {
    r.family = AgentFamily::kStochastic;
    c.use_dropout = dropout;
    c.use_cdq = cdq;
    c.use_tps = false;
    c.use_delay = delay;
    c.auto_entropy = true;
  };
  if (n == "ddpg") {
    deterministic(false, false, false, false);
  } else if (n == "td3") {
    deterministic(false, true, true, true);
  } else if (n == "me-ddpg" || n == "med") {
    deterministic(true, false, true, true);
  } else if (n == "sac") {
    stochastic(false, true, true);
  } else if (n == "me-sac" || n == "mes") {
    stochastic(true, false, true);
  } else {
    // Ablation names: <base><+|-><component>.
    const std::size_t pos = n.find_last_of("+-");
    if (pos == std::string::npos || pos < 2) throw ConfigError("unknown algorithm '" + std::string(name) + "'");
    const std::string head = n.substr(0, pos);
    if (head == "me" || head == "med" || head == "me-ddpg") {
      deterministic(true, false, true, true);
    } else if (head == "mes" || head == "me-sac") {
      stochastic(true, false, true);
    } else {
      throw ConfigError("unknown algorithm '" + std::string(name) + "'");
    }
    apply_toggle(c, n.substr(pos));
  }
  c.validate();
  return r;
}

/// Table-style ablation variants for a base algorithm, base first.
inline std::vector<std::string> ablation_names(std::string_view algo) {
  const std::string a = internal::lower(algo);
  if (a == "me-ddpg" || a == "med") {
    return {"me-ddpg", "ME+CDQ", "MED-DO", "MED-DU", "MED-TPS", "ddpg"};
  }
  if (a == "me-sac" || a == "mes") {
    return {"me-sac", "MES+CQD", "MES-DU", "MES+FIXENT", "sac"};
  }
  throw ConfigError("no ablation set for '" + std::string(algo) + "'");
}

}  // namespace mepg
