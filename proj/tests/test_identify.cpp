#include <gtest/gtest.h>

#include "excite/error.hpp"
#include "excite/experiments.hpp"
#include "excite/identify.hpp"
#include "excite/rng.hpp"
#include "support.hpp"

using namespace excite;
namespace ts = testing_support;

namespace {

struct Rig {
  RobotModel model = ts::arm3();
  BaseProjection proj = compute_base_projection(model, 1);
  SampledTrajectory traj;
  Rig() {
    OptimizerConfig cfg;
    cfg.duration = 8.0;
    Rng rng(31);
    traj = sample(random_valid_trajectory(model, ConstraintSet::from_model(model), cfg, rng), 100.0);
  }
};

const Rig& rig() {
  static const Rig s;
  return s;
}

RegressorStack measured_stack(const Rig& s, double noise, std::uint64_t seed) {
  const MeasuredRun run = execute(s.model, s.model.truth, s.traj, noise, seed);
  return stack_samples(s.model, s.proj, run.q, run.qd, run.qdd, run.tau);
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(Identify, NoiselessBatchRecoversBaseParameters) {
  const Rig& s = rig();
  const Eigen::VectorXd est = batch_identify(measured_stack(s, 0.0, 1));
  EXPECT_LT(rel(est, s.proj.project(s.model.truth.vector())), 1e-6);
}

TEST(Identify, RlsEqualsRegularizedBatchOnPrefixes) {
  const Rig& s = rig();
  const RegressorStack stack = measured_stack(s, 0.1, 2);
  IdentState state = IdentState::initial(s.proj.base_count(), 1e4);
  const auto j = stack.joints;
  for (std::size_t k = 0; k < stack.samples(); ++k) {
    rls_update(state, stack.y.middleRows(static_cast<Eigen::Index>(k) * j, j),
               stack.tau.segment(static_cast<Eigen::Index>(k) * j, j));
    if ((k + 1) % 100 != 0) continue;
    RegressorStack prefix;
    prefix.joints = j;
    prefix.y = stack.y.topRows(static_cast<Eigen::Index>(k + 1) * j);
    prefix.tau = stack.tau.head(static_cast<Eigen::Index>(k + 1) * j);
    const Eigen::VectorXd batch = regularized_identify(prefix, 1e4);
    EXPECT_LT(rel(state.estimate, batch), 1e-6) << "prefix " << k + 1;
  }
  EXPECT_EQ(state.samples, stack.samples());
}

TEST(Identify, CovarianceTraceNeverGrows) {
  const Rig& s = rig();
  const RegressorStack stack = measured_stack(s, 0.05, 3);
  IdentState state = IdentState::initial(s.proj.base_count());
  double trace = state.covariance.trace();
  for (std::size_t k = 0; k < stack.samples(); ++k) {
    rls_update(state, stack.y.middleRows(static_cast<Eigen::Index>(k) * 3, 3),
               stack.tau.segment(static_cast<Eigen::Index>(k) * 3, 3));
    const double next = state.covariance.trace();
    ASSERT_LE(next, trace * (1.0 + 1e-12));
    trace = next;
  }
  EXPECT_LT((state.covariance - state.covariance.transpose()).norm(), 1e-15 * state.covariance.norm());
}

TEST(Identify, ZeroRowsChangeNothing) {
  IdentState state = IdentState::initial(4);
  state.estimate << 1, 2, 3, 4;
  const IdentState before = state;
  rls_update(state, RowMatrix::Zero(2, 4), Eigen::VectorXd::Zero(2));
  EXPECT_EQ(state.estimate, before.estimate);
  EXPECT_EQ(state.covariance, before.covariance);
  EXPECT_EQ(state.samples, 1u);
}

TEST(Identify, ConstantPostureIsRankDeficient) {
  const Rig& s = rig();
  const Eigen::MatrixXd q = s.traj.q.row(100).replicate(200, 1);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(200, 3);
  const RegressorStack stack = stack_samples(s.model, s.proj, q, zero, zero, zero);
  try {
    batch_identify(stack);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("rank-deficient"), std::string::npos);
  }
}

TEST(Identify, ShapeChecks) {
  RegressorStack thin;
  thin.joints = 1;
  thin.y = RowMatrix::Ones(2, 3);
  thin.tau = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(batch_identify(thin), ContractError);
  IdentState state = IdentState::initial(3);
  EXPECT_THROW(rls_update(state, RowMatrix::Ones(1, 2), Eigen::VectorXd::Ones(1)), ContractError);
  EXPECT_THROW(rls_update(state, RowMatrix::Constant(1, 3, NAN), Eigen::VectorXd::Ones(1)), ContractError);
  EXPECT_THROW(IdentState::initial(3, -1.0), ContractError);
}

TEST(Identify, NormalizedErrors) {
  Eigen::MatrixXd measured(4, 3);
  measured << 1, 5, 2, 2, 5, 4, 3, 5, 6, 4, 5, 8;
  EvalReport exact = normalized_errors(measured, measured);
  EXPECT_EQ(exact.nmse[0], 0.0);
  EXPECT_TRUE(std::isnan(exact.nmse[1]));
  ASSERT_EQ(exact.warnings.size(), 1u);
  EXPECT_EQ(exact.average_nmse, 0.0);

  // Predicting the mean gives nMSE 1.
  Eigen::MatrixXd mean = measured;
  mean.col(0).setConstant(2.5);
  mean.col(2).setConstant(5.0);
  const EvalReport r = normalized_errors(mean, measured);
  EXPECT_DOUBLE_EQ(r.nmse[0], 1.0);
  EXPECT_DOUBLE_EQ(r.nmse[2], 1.0);
  EXPECT_DOUBLE_EQ(r.average_nmse, 1.0);
  EXPECT_THROW(normalized_errors(mean, measured.topRows(2)), ContractError);
}

TEST(Identify, EvaluateOnTrainingRun) {
  const Rig& s = rig();
  const MeasuredRun run = execute(s.model, s.model.truth, s.traj, 0.0, 1);
  const Eigen::VectorXd truth = s.proj.project(s.model.truth.vector());
  const EvalReport r = evaluate(s.model, s.proj, truth, run);
  EXPECT_LT(r.average_nmse, 1e-20);
  EXPECT_TRUE(std::isnan(r.covariance_norm));
  const IdentState state = IdentState::initial(s.proj.base_count(), 4.0);
  EXPECT_DOUBLE_EQ(evaluate(s.model, s.proj, truth, run, &state).covariance_norm,
                   4.0 * std::sqrt(static_cast<double>(s.proj.base_count())));
}
