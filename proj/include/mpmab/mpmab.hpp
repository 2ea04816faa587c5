#pragma once

// Umbrella header: deterministic multi-player bandit simulation with
// collision-induced zero rewards, the MEGA policy and its baselines,
// regret metrics, closed-form bounds, presets and reporting.

#include "mpmab/baselines.hpp"
#include "mpmab/bounds.hpp"
#include "mpmab/env.hpp"
#include "mpmab/mega.hpp"
#include "mpmab/metrics.hpp"
#include "mpmab/policy.hpp"
#include "mpmab/report.hpp"
#include "mpmab/rng.hpp"
#include "mpmab/runner.hpp"
#include "mpmab/scenario.hpp"
#include "mpmab/types.hpp"
