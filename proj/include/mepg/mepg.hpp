#pragma once

// Umbrella header.

#include "mepg/common/error.hpp"
#include "mepg/common/rng.hpp"
#include "mepg/numerics/adam.hpp"
#include "mepg/numerics/mlp.hpp"
#include "mepg/numerics/tape.hpp"
#include "mepg/dropout/dropout.hpp"
#include "mepg/envs/env.hpp"
#include "mepg/envs/lqr.hpp"
#include "mepg/envs/registry.hpp"
#include "mepg/replay/replay_buffer.hpp"
#include "mepg/agents/agent.hpp"
#include "mepg/agents/config.hpp"
#include "mepg/agents/losses.hpp"
#include "mepg/agents/train_step.hpp"
#include "mepg/analysis/gp_equivalence.hpp"
#include "mepg/harness/csv.hpp"
#include "mepg/harness/evaluate.hpp"
#include "mepg/harness/experiment.hpp"
#include "mepg/harness/experiment_config.hpp"
#include "mepg/harness/metrics.hpp"
#include "mepg/harness/param_report.hpp"
#include "mepg/harness/svg.hpp"
#include "mepg/harness/sweeps.hpp"
