#pragma once

// Models and helpers shared by the unit tests and the acceptance suite.

#include <filesystem>
#include <numbers>
#include <string>

#include "excite/chain.hpp"
#include "excite/model_io.hpp"
#include "excite/rng.hpp"

namespace testing_support {

inline std::filesystem::path model_path(const std::string& file) {
  return std::filesystem::path(EXCITE_MODEL_DIR) / file;
}

inline excite::RobotModel arm3() { return excite::load_model(model_path("arm3.json")); }
inline excite::RobotModel lwr7() { return excite::load_model(model_path("kuka_lwr4_synthetic.json")); }

inline excite::JointSpec revolute(double a, double alpha, double d, double offset = 0.0) {
  excite::JointSpec js;
  js.name = "j";
  js.a = a;
  js.alpha = alpha;
  js.d = d;
  js.theta_offset = offset;
  js.q_min = -2.8;
  js.q_max = 2.8;
  js.qd_max = 2.0;
  js.qdd_max = 8.0;
  js.capsule = {Eigen::Vector3d(0.02, 0, 0), Eigen::Vector3d(0.2, 0, 0), 0.03};
  return js;
}

/// Physically consistent random link inertial parameters.
inline excite::LinkInertial random_link(excite::Rng& rng) {
  excite::LinkInertial l;
  l.mass = rng.uniform(0.5, 5.0);
  const Eigen::Vector3d c(rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15));
  l.first_moment = l.mass * c;
  // Principal moments obeying the triangle inequality, random orientation.
  const double a = rng.uniform(0.01, 0.1), b = rng.uniform(0.01, 0.1);
  const Eigen::Vector3d principal(a, b, rng.uniform(std::abs(a - b) + 1e-3, a + b));
  const Eigen::Matrix3d rot =
      Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized().toRotationMatrix();
  const Eigen::Matrix3d ic = rot * principal.asDiagonal() * rot.transpose();
  const Eigen::Matrix3d io = ic + l.mass * (c.squaredNorm() * Eigen::Matrix3d::Identity() - c * c.transpose());
  l.inertia = {io(0, 0), io(0, 1), io(0, 2), io(1, 1), io(1, 2), io(2, 2)};
  l.viscous = rng.uniform(0.05, 0.5);
  l.coulomb = rng.uniform(0.05, 0.5);
  return l;
}

/// Random geometry and parameters for a serial chain with J joints.
inline excite::RobotModel random_model(int joints, std::uint64_t seed) {
  excite::Rng rng(seed);
  excite::RobotModel m;
  m.name = "random";
  std::vector<excite::LinkInertial> links;
  for (int i = 0; i < joints; ++i) {
    m.joints.push_back(revolute(rng.uniform(0.0, 0.4), rng.uniform(-std::numbers::pi, std::numbers::pi),
                                rng.uniform(0.0, 0.4), rng.uniform(-1.0, 1.0)));
    links.push_back(random_link(rng));
  }
  m.truth = excite::InertialParams::from_links(links);
  return m;
}

/// Planar chain (all axes parallel) with gravity in the plane of motion.
inline excite::RobotModel planar_chain(int joints, std::uint64_t seed = 5) {
  excite::Rng rng(seed);
  excite::RobotModel m;
  m.name = "planar";
  m.gravity = Eigen::Vector3d(0.0, -9.81, 0.0);
  std::vector<excite::LinkInertial> links;
  for (int i = 0; i < joints; ++i) {
    m.joints.push_back(revolute(i == 0 ? 0.0 : 0.3, 0.0, 0.0));
    links.push_back(random_link(rng));
  }
  m.truth = excite::InertialParams::from_links(links);
  return m;
}

/// One link rotating about z, centre of mass at (l, 0, 0), gravity along -y.
inline excite::RobotModel pendulum(double mass, double l) {
  excite::RobotModel m;
  m.name = "pendulum";
  m.gravity = Eigen::Vector3d(0.0, -9.81, 0.0);
  m.joints.push_back(revolute(0.0, 0.0, 0.0));
  excite::LinkInertial link;
  link.mass = mass;
  link.first_moment = Eigen::Vector3d(mass * l, 0.0, 0.0);
  link.inertia = {0.01, 0, 0, 0.01 + mass * l * l, 0, 0.01 + mass * l * l};
  m.truth = excite::InertialParams::from_links(std::vector<excite::LinkInertial>{link});
  return m;
}

}  // namespace testing_support
