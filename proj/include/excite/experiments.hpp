#pragma once

// End-to-end workflows shared by the command-line tool and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

#include "excite/identify.hpp"
#include "excite/optimizer.hpp"

namespace excite {

struct LongVsMultiConfig {
  double budget_seconds = 60.0;  // optimizer wall clock per variant
  int segments = 8;
  double segment_duration = 4.0;
  double long_duration = 32.0;
  double noise_level = 0.1;
  NoiseMode noise_mode = NoiseMode::multiplicative;
  double delta = 1e4;
  double test_duration = 16.0;
  std::uint64_t seed = 1;
  OptimizerConfig optimizer;  // duration, seed and budgets are overridden per run
};

struct VariantResult {
  std::string name;
  int trajectories = 0;
  double duration = 0.0;  // seconds of identification data
  int valid = 0;          // trajectories passing the constraint check
  FitnessValue stacked_fitness;
  EvalReport evaluation;
  long evaluations = 0;
};

struct LongVsMultiResult {
  VariantResult single;
  VariantResult multi;
};

/// One long trajectory against `segments` short ones under the same optimizer
/// wall-clock budget. Both are executed with noise, identified by RLS and
/// evaluated on a shared held-out noisy run of a random valid trajectory.
LongVsMultiResult compare_long_vs_multi(const RobotModel& model, const BaseProjection& projection,
                                        const ConstraintSet& cs, const LongVsMultiConfig& cfg);

/// Random valid trajectory by rejection sampling within the optimizer's search
/// box; throws NumericalError after `attempts` failures.
FourierTrajectory random_valid_trajectory(const RobotModel& model, const ConstraintSet& cs,
                                          const OptimizerConfig& cfg, Rng& rng, int attempts = 2000);

}  // namespace excite
