#pragma once

#include <Eigen/Core>
#include <span>

#include "excite/base_params.hpp"
#include "excite/chain.hpp"
#include "excite/trajectory.hpp"

namespace excite {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Stacked base regressor rows and torques. Row block k (J rows) belongs to
/// sample k, in input order; trajectories are appended in the order given.
struct RegressorStack {
  int joints = 0;
  RowMatrix y;          // (J * samples) x b
  Eigen::VectorXd tau;  // J * samples

  std::size_t samples() const { return joints > 0 ? static_cast<std::size_t>(y.rows()) / joints : 0; }
  int base_count() const { return static_cast<int>(y.cols()); }
};

/// Regressor rows for every sample; torques come from the model's ground-truth
/// parameters via inverse dynamics. Throws ContractError on an empty input.
RegressorStack stack_regressors(const RobotModel& model, const BaseProjection& projection,
                                const SampledTrajectory& traj);
RegressorStack stack_regressors(const RobotModel& model, const BaseProjection& projection,
                                std::span<const SampledTrajectory> trajs);

/// Rows for explicit per-sample states (n x J each) with measured torques (n x J).
RegressorStack stack_samples(const RobotModel& model, const BaseProjection& projection,
                             const Eigen::MatrixXd& q, const Eigen::MatrixXd& qd,
                             const Eigen::MatrixXd& qdd, const Eigen::MatrixXd& tau);

/// Appends `more` below `stack` (same J and b required).
void append(RegressorStack& stack, const RegressorStack& more);

/// Y^T Y of a stack, accumulated with the vectorized kernel.
Eigen::MatrixXd gram(const RegressorStack& stack);

/// Y^T Y for a sampled trajectory without materializing the whole stack.
/// Positions are wrapped into [-pi, pi] first, so any finite trajectory works.
Eigen::MatrixXd excitation_gram(const RobotModel& model, const BaseProjection& projection,
                                const SampledTrajectory& traj);

}  // namespace excite
