#include "excite/regressor_stack.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "excite/error.hpp"
#include "excite/kernels.hpp"

namespace excite {

namespace {

void check_projection(const RobotModel& model, const BaseProjection& projection) {
  if (projection.full_count != model.joint_count() * kParamsPerLink) {
    throw ContractError("regressor stack: projection does not belong to this model");
  }
}

// Writes the base rows of sample `state` into rows [row, row + J) of `out`.
void base_rows(const RobotModel& model, const BaseProjection& projection, const JointState& state,
               Eigen::MatrixXd& full, RowMatrix& out, Eigen::Index row) {
  compute_regressor(model, state, full);
  for (int k = 0; k < projection.base_count(); ++k) {
    out.block(row, k, model.joint_count(), 1) = full.col(projection.independent[k]);
  }
}

}  // namespace

RegressorStack stack_regressors(const RobotModel& model, const BaseProjection& projection,
                                const SampledTrajectory& traj) {
  return stack_regressors(model, projection, std::span<const SampledTrajectory>(&traj, 1));
}

RegressorStack stack_regressors(const RobotModel& model, const BaseProjection& projection,
                                std::span<const SampledTrajectory> trajs) {
  check_projection(model, projection);
  const int joints = model.joint_count();
  std::size_t total = 0;
  for (const auto& t : trajs) {
    if (t.joints() != joints) throw ContractError("stack_regressors: joint count mismatch");
    total += t.size();
  }
  if (total == 0) throw ContractError("stack_regressors: empty input, nothing to stack");
  const bool has_truth = model.truth.vector().size() == joints * kParamsPerLink;

  RegressorStack stack;
  stack.joints = joints;
  stack.y.resize(static_cast<Eigen::Index>(total) * joints, projection.base_count());
  stack.tau = Eigen::VectorXd::Zero(stack.y.rows());
  Eigen::MatrixXd full(joints, joints * kParamsPerLink);
  Eigen::Index row = 0;
  for (const auto& t : trajs) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      const JointState s = t.state(k);
      base_rows(model, projection, s, full, stack.y, row);
      if (has_truth) {
        stack.tau.segment(row, joints) =
            rnea(model, model.truth, s, model.gravity) + friction_torque(model.truth, s.qd);
      }
      row += joints;
    }
  }
  return stack;
}

RegressorStack stack_samples(const RobotModel& model, const BaseProjection& projection,
                             const Eigen::MatrixXd& q, const Eigen::MatrixXd& qd,
                             const Eigen::MatrixXd& qdd, const Eigen::MatrixXd& tau) {
  check_projection(model, projection);
  const int joints = model.joint_count();
  const Eigen::Index n = q.rows();
  if (n == 0) throw ContractError("stack_samples: empty input, nothing to stack");
  if (q.cols() != joints || qd.rows() != n || qd.cols() != joints || qdd.rows() != n ||
      qdd.cols() != joints || tau.rows() != n || tau.cols() != joints) {
    throw ContractError("stack_samples: state/torque matrices must all be n x J");
  }
  RegressorStack stack;
  stack.joints = joints;
  stack.y.resize(n * joints, projection.base_count());
  stack.tau.resize(n * joints);
  Eigen::MatrixXd full(joints, joints * kParamsPerLink);
  for (Eigen::Index k = 0; k < n; ++k) {
    const JointState s{q.row(k).transpose(), qd.row(k).transpose(), qdd.row(k).transpose()};
    base_rows(model, projection, s, full, stack.y, k * joints);
    stack.tau.segment(k * joints, joints) = tau.row(k).transpose();
  }
  return stack;
}

void append(RegressorStack& stack, const RegressorStack& more) {
  if (stack.y.rows() == 0) {
    stack = more;
    return;
  }
  if (more.joints != stack.joints || more.y.cols() != stack.y.cols()) {
    throw ContractError("append: stacks have different shapes");
  }
  const Eigen::Index r0 = stack.y.rows();
  stack.y.conservativeResize(r0 + more.y.rows(), Eigen::NoChange);
  stack.y.bottomRows(more.y.rows()) = more.y;
  stack.tau.conservativeResize(r0 + more.tau.size());
  stack.tau.tail(more.tau.size()) = more.tau;
}

Eigen::MatrixXd gram(const RegressorStack& stack) {
  const auto cols = static_cast<std::size_t>(stack.y.cols());
  std::vector<double> g(cols * cols, 0.0);
  kernels::gram_accumulate({stack.y.data(), static_cast<std::size_t>(stack.y.size())},
                           static_cast<std::size_t>(stack.y.rows()), cols, cols, g);
  return Eigen::Map<const RowMatrix>(g.data(), stack.y.cols(), stack.y.cols());
}

Eigen::MatrixXd excitation_gram(const RobotModel& model, const BaseProjection& projection,
                                const SampledTrajectory& traj) {
  check_projection(model, projection);
  const int joints = model.joint_count();
  const int b = projection.base_count();
  constexpr std::size_t kChunk = 64;
  RowMatrix rows(static_cast<Eigen::Index>(kChunk) * joints, b);
  Eigen::MatrixXd full(joints, joints * kParamsPerLink);
  std::vector<double> g(static_cast<std::size_t>(b) * b, 0.0);
  for (std::size_t start = 0; start < traj.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, traj.size() - start);
    for (std::size_t k = 0; k < count; ++k) {
      JointState s = traj.state(start + k);
      // Candidates may wander past one turn; the dynamics are 2 pi periodic.
      s.q = s.q.unaryExpr([](double q) { return std::remainder(q, 2.0 * std::numbers::pi); });
      base_rows(model, projection, s, full, rows, static_cast<Eigen::Index>(k) * joints);
    }
    kernels::gram_accumulate({rows.data(), static_cast<std::size_t>(rows.size())},
                             count * joints, b, b, g);
  }
  return Eigen::Map<const RowMatrix>(g.data(), b, b);
}

}  // namespace excite
