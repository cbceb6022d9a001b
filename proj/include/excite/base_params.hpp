#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "excite/chain.hpp"

namespace excite {

/// Mapping from the full parameter space (12 J) to the identifiable base
/// parameters (b). With the full columns split into independent (kept) and
/// dependent ones,
///     Y_b   = Y[:, independent]
///     pi_b  = pi[independent] + beta * pi[dependent]
/// so that Y_b * pi_b == Y * pi at every state.
struct BaseProjection {
  int full_count = 0;
  std::vector<int> independent;  // full-space column indices, ascending
  std::vector<int> dependent;
  Eigen::MatrixXd beta;          // b x (full - b)
  /// Normalized |R_kk| / |R_00| from the pivoted QR, in pivot order.
  std::vector<double> pivot_ratios;

  int base_count() const { return static_cast<int>(independent.size()); }

  /// pi_b for a full parameter vector.
  Eigen::VectorXd project(const Eigen::VectorXd& full) const;

  /// The b x full matrix K with pi_b = K pi.
  Eigen::MatrixXd matrix() const;
};

struct BaseProjectionOptions {
  /// Dependent iff |R_kk| < tolerance * |R_00| (columns normalized first).
  double tolerance = 1e-10;
  /// Ratios inside (tolerance / ambiguity_band, tolerance * ambiguity_band)
  /// make the rank call ambiguous.
  double ambiguity_band = 1e3;
  /// Number of random states; 0 means 5 * 12 J (minimum 100).
  int states = 0;
};

/// Numerical base-parameter analysis: random states drawn inside the joint
/// limits, stacked full regressors, column-pivoted QR. Throws NumericalError
/// ("rank ambiguity", with the gap) when no clear gap separates the pivots.
BaseProjection compute_base_projection(const RobotModel& model, std::uint64_t rng_seed,
                                       const BaseProjectionOptions& options = {});

/// Y_b from a full regressor block (rows x 12 J).
Eigen::MatrixXd base_regressor(const BaseProjection& projection, const Eigen::MatrixXd& full);

/// Uniform random state inside the model's position/velocity/acceleration limits.
class Rng;
JointState random_state(const RobotModel& model, Rng& rng);

}  // namespace excite
