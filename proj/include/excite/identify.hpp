#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>
#include <vector>

#include "excite/base_params.hpp"
#include "excite/regressor_stack.hpp"
#include "excite/simrobot.hpp"

namespace excite {

/// sigma_min / sigma_max below which a stack is rank-deficient (the square
/// root of the eigenvalue threshold of the fitness module).
inline constexpr double kRankDeficientRatio = 1e-7;

/// Minimum-norm least-squares estimate of pi_b via the SVD pseudo-inverse.
/// Throws NumericalError naming the smallest singular values when the stack
/// is rank-deficient, ContractError when it has fewer rows than columns.
Eigen::VectorXd batch_identify(const RegressorStack& stack);

/// (Y^T Y + P0^-1)^-1 Y^T tau with P0 = delta I: the solution RLS reaches
/// from a zero initial estimate.
Eigen::VectorXd regularized_identify(const RegressorStack& stack, double delta);

struct IdentState {
  Eigen::VectorXd estimate;    // pi_b hat
  Eigen::MatrixXd covariance;  // P
  std::size_t samples = 0;
  double forgetting = 1.0;

  /// Zero estimate, P = delta I.
  static IdentState initial(int base_count, double delta = 1e4, double forgetting = 1.0);
};

/// One RLS step for a row block (J x b) and its torques. The covariance uses
/// the Joseph form and is re-symmetrized. Non-finite input throws
/// ContractError.
void rls_update(IdentState& state, const Eigen::Ref<const RowMatrix>& rows,
                const Eigen::Ref<const Eigen::VectorXd>& tau);

/// Feeds every sample block of the stack in order.
void rls_update(IdentState& state, const RegressorStack& stack);

/// tau hat = Y_b(state) pi_b.
Eigen::VectorXd predict_torque(const RobotModel& model, const BaseProjection& projection,
                               const Eigen::VectorXd& estimate, const JointState& state);

/// Predictions for every sample of a run (n x J).
Eigen::MatrixXd predict_torques(const RobotModel& model, const BaseProjection& projection,
                                const Eigen::VectorXd& estimate, const MeasuredRun& run);

struct EvalReport {
  /// Per joint mean((tau hat - tau)^2) / var(tau); NaN for a joint whose
  /// measured torque has zero variance (excluded from the average).
  std::vector<double> nmse;
  double average_nmse = 0.0;
  /// ||diag(P)||_2 of the identification state, NaN when none was given.
  double covariance_norm = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

EvalReport evaluate(const RobotModel& model, const BaseProjection& projection,
                    const Eigen::VectorXd& estimate, const MeasuredRun& test,
                    const IdentState* state = nullptr);

/// Per-joint nMSE of predictions against measurements (both n x J).
EvalReport normalized_errors(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& measured);

}  // namespace excite
