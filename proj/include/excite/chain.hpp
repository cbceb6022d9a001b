#pragma once

// Serial-manipulator kinematics and rigid-body dynamics.
//
// Kinematic convention: modified Denavit-Hartenberg (Craig). The transform
// from frame i-1 to frame i is
//     RotX(alpha_i) * TransX(a_i) * RotZ(theta_i) * TransZ(d_i),
// with theta_i = q_i + theta_offset_i; every joint is revolute about its
// local z axis. This is the only place the convention is defined.
//
// Per-link parameter layout (12 entries, link i occupies [12 i, 12 i + 12)):
//     0      mass m                                   [kg]
//     1..3   first mass moment m*c (x, y, z)          [kg m]
//     4..9   inertia about the link-frame origin      [kg m^2]
//            (xx, xy, xz, yy, yz, zz)
//     10     viscous friction                         [N m s/rad]
//     11     Coulomb friction                         [N m]
// Friction torque of joint i is viscous*qd + coulomb*tanh(qd / 1e-3).

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace excite {

inline constexpr int kParamsPerLink = 12;
inline constexpr double kCoulombSmoothing = 1e-3;  // rad/s

struct Capsule {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();  // link frame [m]
  Eigen::Vector3d p1 = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

struct JointSpec {
  std::string name;
  double a = 0.0;             // [m]
  double alpha = 0.0;         // [rad]
  double d = 0.0;             // [m]
  double theta_offset = 0.0;  // [rad]
  double q_min = 0.0;
  double q_max = 0.0;
  double qd_max = 0.0;
  double qdd_max = 0.0;
  Capsule capsule;
};

/// Forbidden region {x : normal . x < offset} (base frame), applied to the
/// capsules of links with index >= first_link.
struct HalfSpace {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double offset = 0.0;
  int first_link = 0;
};

/// Constraint settings stored alongside the model.
struct ConstraintSettings {
  std::vector<HalfSpace> halfspaces;
  double collision_margin = 0.01;
  /// Extra non-adjacent link pairs skipped by the self-collision test.
  std::vector<std::pair<int, int>> exempt_pairs;
};

struct LinkInertial {
  double mass = 0.0;
  Eigen::Vector3d first_moment = Eigen::Vector3d::Zero();
  std::array<double, 6> inertia{};  // xx, xy, xz, yy, yz, zz about the frame origin
  double viscous = 0.0;
  double coulomb = 0.0;
};

/// Full parameter vector pi of length 12 * joint_count.
class InertialParams {
 public:
  InertialParams() = default;
  explicit InertialParams(Eigen::VectorXd values);

  static InertialParams zeros(int joints);
  static InertialParams from_links(std::span<const LinkInertial> links);

  int joint_count() const { return static_cast<int>(values_.size()) / kParamsPerLink; }
  LinkInertial link(int i) const;

  const Eigen::VectorXd& vector() const { return values_; }
  Eigen::VectorXd& vector() { return values_; }

 private:
  Eigen::VectorXd values_;
};

struct RobotModel {
  std::string name;
  std::vector<JointSpec> joints;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
  InertialParams truth;
  ConstraintSettings constraints;
  bool synthetic_ground_truth = true;

  int joint_count() const { return static_cast<int>(joints.size()); }

  /// Throws ContractError when an invariant is broken.
  void validate() const;
};

struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Eigen::VectorXd qdd;
};

struct DynamicsTerms {
  Eigen::MatrixXd inertia;   // M(q)
  Eigen::VectorXd coriolis;  // C(q, qd) qd
  Eigen::VectorXd gravity;   // G(q)
  Eigen::VectorXd friction;  // F(qd)
  Eigen::VectorXd tau;
};

/// Homogeneous transform of frame i relative to frame i-1.
Eigen::Isometry3d joint_transform(const JointSpec& joint, double q);

/// Base-frame poses of all link frames at configuration q.
std::vector<Eigen::Isometry3d> link_poses(const RobotModel& model, const Eigen::VectorXd& q);

/// Friction torque per joint for the parameters in `params`.
Eigen::VectorXd friction_torque(const InertialParams& params, const Eigen::VectorXd& qd);

/// Recursive Newton-Euler torques (rigid body part only, no friction).
Eigen::VectorXd rnea(const RobotModel& model, const InertialParams& params,
                     const JointState& state, const Eigen::Vector3d& gravity);

DynamicsTerms inverse_dynamics(const RobotModel& model, const InertialParams& params,
                               const JointState& state);

/// Full regressor Y (J x 12J) with Y * pi == inverse_dynamics(model, pi, state).tau.
Eigen::MatrixXd compute_regressor(const RobotModel& model, const JointState& state);

/// Same as compute_regressor, writing into a preallocated J x 12J block.
void compute_regressor(const RobotModel& model, const JointState& state,
                       Eigen::Ref<Eigen::MatrixXd> out);

/// Throws ContractError unless every state vector has length J, is finite and
/// positions are within the +-2 pi wrap tolerance.
void check_state(const RobotModel& model, const JointState& state);

}  // namespace excite
