#pragma once

// Excitation trajectory search: an elitist (mu + lambda) evolution strategy
// over coefficients and offsets, refined by compass search.
//
// Objective of a candidate x:
//     log10(fitness(x)) + penalty_weight * violation_penalty(x)
// where the penalty is evaluated against limits tightened by `safety`, so
// that the small residual violation of a quadratic penalty still lands inside
// the real limits. Undefined fitness counts as kUndefinedFitnessLog.

#include <cstdint>
#include <vector>

#include "excite/base_params.hpp"
#include "excite/constraints.hpp"
#include "excite/dataset.hpp"
#include "excite/trajectory.hpp"

namespace excite {

enum class Objective { eigenvalue, diagonal };

inline constexpr double kUndefinedFitnessLog = 20.0;

struct OptimizerConfig {
  Objective objective = Objective::eigenvalue;
  int population = 16;  // mu = lambda = population
  int generations = 30;
  double mutation_scale = 0.25;  // initial sigma, fraction of each coordinate's bound
  double compass_step = 0.1;     // fraction of each coordinate's bound
  double compass_shrink = 0.5;
  double compass_min_step = 2e-3;
  double penalty_weight = 1e3;
  /// Coefficient magnitude bound; 0 picks per joint the largest value keeping
  /// the Fourier velocity and acceleration below 80 % of the limits.
  double coefficient_bound = 0.0;
  /// Offsets stay within this centred fraction of each joint range.
  double offset_fraction = 0.4;
  /// Relative tightening of limits and absolute margin [m] added to geometric
  /// clearances inside the objective.
  double safety = 0.02;
  std::uint64_t seed = 1;
  double duration = kDefaultDuration;
  int harmonics = kDefaultHarmonics;
  double rate_hz = kDefaultRateHz;
  /// 0 means unlimited.
  long max_evaluations = 0;
  double time_budget_seconds = 0.0;

  /// Throws ContractError on an inconsistent configuration.
  void validate() const;
};

struct OptimizedTrajectory {
  FourierTrajectory trajectory;
  double objective = 0.0;
  FitnessValue fitness;  // of the configured objective kind
  ValidityReport report;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  long evaluations = 0;
  std::vector<double> evolution_trace;  // best objective after each generation
  std::vector<double> compass_trace;    // objective after each accepted compass move
};

/// Search box for coefficients and offsets, flat layout [coeffs..., offsets...].
struct SearchBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

SearchBox search_box(const RobotModel& model, const OptimizerConfig& cfg);

/// Objective of one candidate, as used by optimize_one.
struct CandidateScore {
  double objective = 0.0;
  FitnessValue fitness;
  double penalty = 0.0;
};

CandidateScore score_candidate(const RobotModel& model, const BaseProjection& projection,
                               const ConstraintSet& cs, const OptimizerConfig& cfg,
                               const FourierTrajectory& trajectory);

/// One optimized trajectory; deterministic for a given seed unless a time
/// budget cuts the search short.
OptimizedTrajectory optimize_one(const RobotModel& model, const BaseProjection& projection,
                                 const ConstraintSet& cs, const OptimizerConfig& cfg,
                                 std::uint64_t seed);

/// `count` independent runs with seeds derive_seed(cfg.seed, i), run on up to
/// `parallelism` threads. Records are ordered by index; a failing run is
/// recorded with its error message instead of aborting the batch.
TrajectoryDataset generate_seed_set(const RobotModel& model, const BaseProjection& projection,
                                    const ConstraintSet& cs, const OptimizerConfig& cfg, int count,
                                    int parallelism);

/// Uniformly random coefficients/offsets inside the search box.
FourierTrajectory random_trajectory(const RobotModel& model, const OptimizerConfig& cfg, Rng& rng);

}  // namespace excite
