#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "excite/chain.hpp"
#include "excite/trajectory.hpp"

namespace excite {

struct ConstraintSet {
  std::vector<HalfSpace> halfspaces;
  double collision_margin = 0.01;  // [m]
  /// Pairs (a < b) skipped by the self-collision test; always contains the
  /// adjacent pairs (i, i+1).
  std::vector<std::pair<int, int>> exempt_pairs;

  /// Default: everything below 10 cm above the table plane z = 0 is forbidden
  /// for links >= 1, margin 1 cm, plus the model's own settings.
  static ConstraintSet from_model(const RobotModel& model);

  bool exempt(int a, int b) const;
};

enum class ViolationKind { none, limit, workspace, collision };

std::string_view to_string(ViolationKind kind);
ViolationKind violation_from_string(std::string_view text);

struct ValidityReport {
  bool valid = true;
  ViolationKind kind = ViolationKind::none;
  std::ptrdiff_t sample = -1;  // first violating sample
  int joint = -1;              // joint (limit) or first link (workspace / collision)
  int other_link = -1;         // second link of a colliding pair
  /// Smallest geometric clearance over the trajectory [m] (workspace and
  /// self-collision), negative when violated.
  double worst_margin = 0.0;
};

/// Full scan: validity report plus graded infeasibility.
struct ConstraintScan {
  ValidityReport report;
  double penalty = 0.0;
};

ConstraintScan scan(const SampledTrajectory& traj, const RobotModel& model, const ConstraintSet& cs);

/// Limits, half-spaces and capsule self-collision at every sample.
ValidityReport check(const SampledTrajectory& traj, const RobotModel& model, const ConstraintSet& cs);

/// Sum over samples of squared constraint violations; 0 exactly on the valid set.
double violation_penalty(const SampledTrajectory& traj, const RobotModel& model,
                         const ConstraintSet& cs);

/// Minimum distance between segments [p0, p1] and [q0, q1].
double segment_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                        const Eigen::Vector3d& q0, const Eigen::Vector3d& q1);

/// Base-frame capsule endpoints of every link at configuration q.
std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> capsule_endpoints(const RobotModel& model,
                                                                           const Eigen::VectorXd& q);

}  // namespace excite
