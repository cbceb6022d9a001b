#include <gtest/gtest.h>

#include "excite/base_params.hpp"
#include "excite/chain.hpp"
#include "excite/error.hpp"
#include "excite/rng.hpp"
#include "oracles/lagrangian.hpp"
#include "support.hpp"

using namespace excite;
namespace ts = testing_support;

namespace {

JointState at_rest(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

double relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-12);
}

}  // namespace

TEST(Chain, PendulumHoldingTorque) {
  const double m = 2.0, l = 0.5;
  const RobotModel model = ts::pendulum(m, l);
  const auto terms = inverse_dynamics(model, model.truth, at_rest(1));
  EXPECT_NEAR(terms.tau[0], m * 9.81 * l, 1e-12);
  EXPECT_NEAR(terms.gravity[0], m * 9.81 * l, 1e-12);

  JointState s = at_rest(1);
  s.q[0] = std::numbers::pi / 2;  // centre of mass straight above the axis
  EXPECT_NEAR(inverse_dynamics(model, model.truth, s).tau[0], 0.0, 1e-12);
}

TEST(Chain, PendulumInertiaAboutAxis) {
  const RobotModel model = ts::pendulum(1.5, 0.4);
  JointState s = at_rest(1);
  s.q[0] = -std::numbers::pi / 2;
  s.qdd[0] = 3.0;
  // Izz about the joint axis, gravity gives no moment when hanging.
  EXPECT_NEAR(inverse_dynamics(model, model.truth, s).tau[0], 3.0 * (0.01 + 1.5 * 0.16), 1e-12);
}

TEST(Chain, MatchesLagrangianOracle) {
  for (int joints : {1, 3, 7}) {
    const RobotModel model = ts::random_model(joints, 100 + joints);
    Rng rng(joints);
    for (int trial = 0; trial < 20; ++trial) {
      const JointState s = random_state(model, rng);
      const Eigen::VectorXd expected = oracle::inverse_dynamics(model, model.truth, s);
      const Eigen::VectorXd got = inverse_dynamics(model, model.truth, s).tau;
      EXPECT_LT(relative(got, expected), 1e-10) << "joints=" << joints << " trial=" << trial;
    }
  }
}

TEST(Chain, ShippedModelsMatchLagrangianOracle) {
  for (const RobotModel& model : {ts::arm3(), ts::lwr7()}) {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const JointState s = random_state(model, rng);
      EXPECT_LT(relative(inverse_dynamics(model, model.truth, s).tau,
                         oracle::inverse_dynamics(model, model.truth, s)),
                1e-10);
    }
  }
}

TEST(Chain, MassMatrixMatchesOracle) {
  const RobotModel model = ts::random_model(5, 3);
  Rng rng(5);
  const JointState s = random_state(model, rng);
  const Eigen::MatrixXd m = inverse_dynamics(model, model.truth, s).inertia;
  const Eigen::MatrixXd expected =
      oracle::mass_matrix<double>(model, model.truth, s.q);
  EXPECT_LT((m - expected).norm(), 1e-10 * expected.norm());
  EXPECT_LT((m - m.transpose()).norm(), 1e-12 * m.norm());
}

TEST(Chain, VelocityTermsConserveEnergy) {
  // Without gravity and friction, qd . c(q, qd) = qd^T Mdot qd / 2.
  RobotModel model = ts::random_model(6, 8);
  model.gravity.setZero();
  InertialParams params = model.truth;
  for (int i = 0; i < 6; ++i) params.vector().segment(12 * i + 10, 2).setZero();
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    JointState s = random_state(model, rng);
    s.qdd.setZero();
    const double h = 1e-6;
    JointState a = s, b = s;
    a.q += h * s.qd;
    b.q -= h * s.qd;
    const Eigen::MatrixXd mdot =
        (inverse_dynamics(model, params, a).inertia - inverse_dynamics(model, params, b).inertia) / (2 * h);
    const double power = s.qd.dot(inverse_dynamics(model, params, s).tau);
    EXPECT_NEAR(power, 0.5 * s.qd.dot(mdot * s.qd), 1e-7 * std::max(1.0, std::abs(power)));
  }
}

TEST(Chain, TermsSumToTorque) {
  const RobotModel model = ts::arm3();
  Rng rng(8);
  const JointState s = random_state(model, rng);
  const auto t = inverse_dynamics(model, model.truth, s);
  EXPECT_LT(relative(t.inertia * s.qdd + t.coriolis + t.gravity + t.friction, t.tau), 1e-12);
}

TEST(Chain, LinkPosesMatchOracleKinematics) {
  const RobotModel model = ts::random_model(6, 12);
  Rng rng(2);
  const JointState s = random_state(model, rng);
  const auto poses = link_poses(model, s.q);
  const auto frames = oracle::forward<double>(model, s.q);
  ASSERT_EQ(poses.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_LT((poses[i].rotation() - frames.r[i]).norm(), 1e-12);
    EXPECT_LT((poses[i].translation() - frames.p[i]).norm(), 1e-12);
  }
}

TEST(Regressor, ColumnsAreUnitParameterTorques) {
  const RobotModel model = ts::random_model(3, 44);
  Rng rng(4);
  const JointState s = random_state(model, rng);
  const Eigen::MatrixXd y = compute_regressor(model, s);
  ASSERT_EQ(y.cols(), 36);
  for (int k = 0; k < y.cols(); ++k) {
    const InertialParams unit(Eigen::VectorXd::Unit(36, k));
    const Eigen::VectorXd tau = inverse_dynamics(model, unit, s).tau;
    EXPECT_LT((y.col(k) - tau).norm(), 1e-12 * std::max(1.0, tau.norm())) << "column " << k;
  }
}

TEST(Regressor, LinearInParameters) {
  for (const RobotModel& model : {ts::arm3(), ts::lwr7()}) {
    Rng rng(21);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const JointState s = random_state(model, rng);
      Eigen::VectorXd pi(model.joint_count() * kParamsPerLink);
      for (auto& v : pi) v = rng.uniform(-1.0, 1.0);
      const InertialParams params(pi);
      worst = std::max(worst, relative(compute_regressor(model, s) * pi,
                                       inverse_dynamics(model, params, s).tau));
    }
    EXPECT_LT(worst, 1e-10);
  }
}

TEST(Regressor, InPlaceMatchesAllocating) {
  const RobotModel model = ts::lwr7();
  Rng rng(6);
  const JointState s = random_state(model, rng);
  Eigen::MatrixXd block = Eigen::MatrixXd::Constant(14, 84, 7.0);
  compute_regressor(model, s, block.bottomRows(7));
  EXPECT_EQ(block.bottomRows(7), compute_regressor(model, s));
}

TEST(Chain, RejectsBadStates) {
  const RobotModel model = ts::arm3();
  JointState s = at_rest(3);
  s.q[1] = std::nan("");
  EXPECT_THROW(compute_regressor(model, s), ContractError);
  s = at_rest(2);
  EXPECT_THROW(inverse_dynamics(model, model.truth, s), ContractError);
  s = at_rest(3);
  s.q[0] = 7.0;
  EXPECT_THROW(compute_regressor(model, s), ContractError);
}

TEST(Chain, FrictionIsSmoothedCoulombPlusViscous) {
  const RobotModel model = ts::arm3();
  Eigen::VectorXd qd(3);
  qd << 0.5, -1e-3, 0.0;
  const Eigen::VectorXd f = friction_torque(model.truth, qd);
  for (int i = 0; i < 3; ++i) {
    const auto l = model.truth.link(i);
    EXPECT_DOUBLE_EQ(f[i], l.viscous * qd[i] + l.coulomb * std::tanh(qd[i] / 1e-3));
  }
  EXPECT_EQ(f[2], 0.0);
}
