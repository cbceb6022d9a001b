#include <gtest/gtest.h>

#include "excite/error.hpp"
#include "excite/fitness.hpp"
#include "excite/regressor_stack.hpp"
#include "excite/rng.hpp"
#include "oracles/jacobi_eigen.hpp"
#include "support.hpp"

using namespace excite;
namespace ts = testing_support;

namespace {

// Random stack with columns spread over several orders of magnitude.
RegressorStack random_stack(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RegressorStack s;
  s.joints = 1;
  s.y.resize(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    for (Eigen::Index r = 0; r < rows; ++r) s.y(r, c) = scale * rng.normal();
  }
  s.tau = Eigen::VectorXd::Zero(rows);
  return s;
}

}  // namespace

TEST(Fitness, AgreesWithDenseOracles) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cols = static_cast<Eigen::Index>(2 + rng.below(30));
    const auto rows = cols + static_cast<Eigen::Index>(rng.below(200));
    const RegressorStack s = random_stack(rng, rows, cols);
    const Eigen::MatrixXd g = Eigen::MatrixXd(s.y).transpose() * Eigen::MatrixXd(s.y);
    const Eigen::VectorXd ev = oracle::jacobi_eigenvalues(g);
    const FitnessValue f = eigenvalue_fitness(s);
    ASSERT_TRUE(f.ok());
    EXPECT_NEAR(f.value, ev[0] / ev[cols - 1], 1e-6 * ev[0] / ev[cols - 1]);
    const Eigen::VectorXd psi = excitation_vector(s);
    for (Eigen::Index c = 0; c < cols; ++c) {
      double sum = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) sum += s.y(r, c) * s.y(r, c);
      EXPECT_NEAR(psi[c], sum, 1e-12 * sum);
    }
    EXPECT_NEAR(diagonal_fitness(s).value, psi.maxCoeff() / psi.minCoeff(), 1e-12 * diagonal_fitness(s).value);
    const FitnessValue from_gram = eigenvalue_fitness_from_gram(gram(s));
    EXPECT_NEAR(from_gram.value, f.value, 1e-6 * f.value);
  }
}

TEST(Fitness, DuplicatedRowsKeepRatios) {
  Rng rng(2);
  RegressorStack s = random_stack(rng, 60, 8);
  const FitnessValue before = eigenvalue_fitness(s);
  const Eigen::VectorXd psi = excitation_vector(s);
  append(s, RegressorStack(s));
  EXPECT_NEAR(eigenvalue_fitness(s).value, before.value, 1e-9 * before.value);
  EXPECT_LT((excitation_vector(s) - 2.0 * psi).norm(), 1e-12 * psi.norm());
}

TEST(Fitness, ConditionOfOrthogonalColumns) {
  RegressorStack s;
  s.joints = 1;
  s.y = RowMatrix::Zero(4, 2);
  s.y(0, 0) = 1.0;
  s.y(1, 1) = 3.0;
  s.tau = Eigen::VectorXd::Zero(4);
  EXPECT_NEAR(eigenvalue_fitness(s).value, 9.0, 1e-12);
  EXPECT_NEAR(diagonal_fitness(s).value, 9.0, 1e-12);
}

TEST(Fitness, UndefinedCases) {
  Rng rng(3);
  RegressorStack s = random_stack(rng, 20, 4);
  s.y.col(3) = s.y.col(1);
  EXPECT_EQ(eigenvalue_fitness(s).status, FitnessValue::Status::unidentifiable);
  EXPECT_TRUE(diagonal_fitness(s).ok());
  s.y.col(2).setZero();
  const FitnessValue d = diagonal_fitness(s);
  EXPECT_EQ(d.status, FitnessValue::Status::unexcited);
  EXPECT_EQ(d.index, 2);
  EXPECT_EQ(d.describe(), "unexcited parameter 2");

  RegressorStack thin = random_stack(rng, 3, 4);
  EXPECT_THROW(eigenvalue_fitness(thin), ContractError);
}

TEST(RegressorStack, RowsFollowSampleOrder) {
  const RobotModel model = ts::arm3();
  const BaseProjection proj = compute_base_projection(model, 1);
  Rng rng(4);
  Eigen::VectorXd c(36);
  for (auto& v : c) v = rng.uniform(-0.2, 0.2);
  const SampledTrajectory traj = sample(build_trajectory(c, Eigen::VectorXd::Zero(3), 6, 2.0), 50.0);
  const RegressorStack s = stack_regressors(model, proj, traj);
  ASSERT_EQ(s.samples(), traj.size());
  ASSERT_EQ(s.base_count(), proj.base_count());
  for (std::size_t k : {std::size_t{0}, std::size_t{40}, traj.size() - 1}) {
    const JointState st = traj.state(k);
    const Eigen::MatrixXd yb = base_regressor(proj, compute_regressor(model, st));
    EXPECT_LT((Eigen::MatrixXd(s.y.middleRows(3 * k, 3)) - yb).norm(), 1e-12 * yb.norm());
    const Eigen::VectorXd tau = inverse_dynamics(model, model.truth, st).tau;
    EXPECT_LT((s.tau.segment(3 * k, 3) - tau).norm(), 1e-12 * std::max(1.0, tau.norm()));
  }
  // Streaming Gram equals the stacked one.
  const Eigen::MatrixXd g = gram(s);
  EXPECT_LT((excitation_gram(model, proj, traj) - g).norm(), 1e-10 * g.norm());
  EXPECT_LT((Eigen::MatrixXd(s.y.transpose() * s.y) - g).norm(), 1e-10 * g.norm());
}

TEST(RegressorStack, ExcitationGramWrapsPositions) {
  const RobotModel model = ts::arm3();
  const BaseProjection proj = compute_base_projection(model, 1);
  Rng rng(5);
  Eigen::VectorXd c(36);
  for (auto& v : c) v = rng.uniform(-0.2, 0.2);
  Eigen::VectorXd o = Eigen::VectorXd::Zero(3);
  const SampledTrajectory a = sample(build_trajectory(c, o, 6, 2.0), 50.0);
  o[0] = 2.0 * std::numbers::pi;
  o[2] = -4.0 * std::numbers::pi;
  const SampledTrajectory b = sample(build_trajectory(c, o, 6, 2.0), 50.0);
  const Eigen::MatrixXd ga = excitation_gram(model, proj, a);
  EXPECT_LT((excitation_gram(model, proj, b) - ga).norm(), 1e-9 * ga.norm());
}

TEST(RegressorStack, EmptyInputThrows) {
  const RobotModel model = ts::arm3();
  const BaseProjection proj = compute_base_projection(model, 1);
  EXPECT_THROW(stack_regressors(model, proj, std::span<const SampledTrajectory>{}), ContractError);
}
