#include "excite/chain.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "excite/error.hpp"

namespace excite {

namespace {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using LinkBlock = Eigen::Matrix<double, 3, 10>;

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

// I * w expressed as a linear map of (xx, xy, xz, yy, yz, zz).
Eigen::Matrix<double, 3, 6> inertia_map(const Vec3& w) {
  Eigen::Matrix<double, 3, 6> l;
  l << w.x(), w.y(), w.z(), 0.0, 0.0, 0.0,
       0.0, w.x(), 0.0, w.y(), w.z(), 0.0,
       0.0, 0.0, w.x(), 0.0, w.y(), w.z();
  return l;
}

Mat3 inertia_tensor(const std::array<double, 6>& i) {
  Mat3 m;
  m << i[0], i[1], i[2], i[1], i[3], i[4], i[2], i[4], i[5];
  return m;
}

struct JointFrame {
  Mat3 rot;  // maps frame-i vectors into frame i-1
  Vec3 pos;  // origin of frame i in frame i-1
};

JointFrame frame_of(const JointSpec& j, double q) {
  const double th = q + j.theta_offset;
  const double ca = std::cos(j.alpha), sa = std::sin(j.alpha);
  const double ct = std::cos(th), st = std::sin(th);
  JointFrame f;
  f.rot << ct, -st, 0.0, ca * st, ca * ct, -sa, sa * st, sa * ct, ca;
  f.pos << j.a, -sa * j.d, ca * j.d;
  return f;
}

struct Motion {
  Vec3 w, wd, vd;
};

// Forward recursion of angular velocity/acceleration and origin acceleration
// (gravity folded in as a base acceleration of -g).
void forward_pass(const RobotModel& model, const JointState& s, const Vec3& gravity,
                  std::vector<JointFrame>& frames, std::vector<Motion>& motion) {
  const int n = model.joint_count();
  frames.resize(n);
  motion.resize(n);
  Vec3 w = Vec3::Zero(), wd = Vec3::Zero(), vd = -gravity;
  const Vec3 z = Vec3::UnitZ();
  for (int i = 0; i < n; ++i) {
    frames[i] = frame_of(model.joints[i], s.q[i]);
    const Mat3 rt = frames[i].rot.transpose();
    const Vec3& p = frames[i].pos;
    const Vec3 vd_next = rt * (vd + wd.cross(p) + w.cross(w.cross(p)));
    const Vec3 w_in = rt * w;
    const Vec3 w_next = w_in + s.qd[i] * z;
    const Vec3 wd_next = rt * wd + w_in.cross(s.qd[i] * z) + s.qdd[i] * z;
    w = w_next;
    wd = wd_next;
    vd = vd_next;
    motion[i] = {w, wd, vd};
  }
}

}  // namespace

InertialParams::InertialParams(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() % kParamsPerLink != 0) {
    throw ContractError("InertialParams: length " + std::to_string(values_.size()) +
                        " is not a multiple of 12");
  }
}

InertialParams InertialParams::zeros(int joints) {
  return InertialParams(Eigen::VectorXd::Zero(joints * kParamsPerLink));
}

InertialParams InertialParams::from_links(std::span<const LinkInertial> links) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(links.size()) * kParamsPerLink);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    auto b = v.segment<kParamsPerLink>(static_cast<Eigen::Index>(i) * kParamsPerLink);
    b[0] = l.mass;
    b.segment<3>(1) = l.first_moment;
    for (int k = 0; k < 6; ++k) b[4 + k] = l.inertia[k];
    b[10] = l.viscous;
    b[11] = l.coulomb;
  }
  return InertialParams(std::move(v));
}

LinkInertial InertialParams::link(int i) const {
  if (i < 0 || i >= joint_count()) throw ContractError("InertialParams::link: index out of range");
  const auto b = values_.segment<kParamsPerLink>(i * kParamsPerLink);
  LinkInertial l;
  l.mass = b[0];
  l.first_moment = b.segment<3>(1);
  for (int k = 0; k < 6; ++k) l.inertia[k] = b[4 + k];
  l.viscous = b[10];
  l.coulomb = b[11];
  return l;
}

void RobotModel::validate() const {
  if (joints.empty()) throw ContractError("robot model: joint_count must be >= 1");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto& j = joints[i];
    const std::string tag = "robot model: joint " + std::to_string(i);
    if (!(j.q_min < j.q_max)) throw ContractError(tag + " position min must be < max");
    if (!(j.qd_max > 0.0) || !(j.qdd_max > 0.0)) {
      throw ContractError(tag + " velocity/acceleration limits must be positive");
    }
    if (!(j.capsule.radius > 0.0)) throw ContractError(tag + " capsule radius must be > 0");
  }
  if (truth.vector().size() != 0 && truth.joint_count() != joint_count()) {
    throw ContractError("robot model: parameter vector length does not match joint count");
  }
  if (constraints.collision_margin < 0.0) throw ContractError("robot model: negative margin");
  for (const auto& [a, b] : constraints.exempt_pairs) {
    if (a < 0 || b < 0 || a >= joint_count() || b >= joint_count()) {
      throw ContractError("robot model: exempt pair references a missing link");
    }
  }
}

Eigen::Isometry3d joint_transform(const JointSpec& joint, double q) {
  const JointFrame f = frame_of(joint, q);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = f.rot;
  t.translation() = f.pos;
  return t;
}

std::vector<Eigen::Isometry3d> link_poses(const RobotModel& model, const Eigen::VectorXd& q) {
  std::vector<Eigen::Isometry3d> poses;
  poses.reserve(model.joints.size());
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (int i = 0; i < model.joint_count(); ++i) {
    t = t * joint_transform(model.joints[i], q[i]);
    poses.push_back(t);
  }
  return poses;
}

void check_state(const RobotModel& model, const JointState& state) {
  const auto n = static_cast<Eigen::Index>(model.joint_count());
  if (state.q.size() != n || state.qd.size() != n || state.qdd.size() != n) {
    throw ContractError("joint state dimension mismatch: expected " + std::to_string(n));
  }
  if (!state.q.allFinite() || !state.qd.allFinite() || !state.qdd.allFinite()) {
    throw ContractError("joint state contains non-finite values");
  }
  constexpr double wrap = 2.0 * std::numbers::pi + 1e-9;
  if (state.q.cwiseAbs().maxCoeff() > wrap) {
    throw ContractError("joint position outside the +-2pi wrap tolerance");
  }
}

Eigen::VectorXd friction_torque(const InertialParams& params, const Eigen::VectorXd& qd) {
  Eigen::VectorXd f(qd.size());
  const auto& v = params.vector();
  for (Eigen::Index i = 0; i < qd.size(); ++i) {
    f[i] = v[i * kParamsPerLink + 10] * qd[i] +
           v[i * kParamsPerLink + 11] * std::tanh(qd[i] / kCoulombSmoothing);
  }
  return f;
}

Eigen::VectorXd rnea(const RobotModel& model, const InertialParams& params,
                     const JointState& state, const Eigen::Vector3d& gravity) {
  const int n = model.joint_count();
  std::vector<JointFrame> frames;
  std::vector<Motion> motion;
  forward_pass(model, state, gravity, frames, motion);

  Eigen::VectorXd tau(n);
  Vec3 f_next = Vec3::Zero(), n_next = Vec3::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const LinkInertial li = params.link(i);
    const Motion& m = motion[i];
    const Mat3 inertia = inertia_tensor(li.inertia);
    const Vec3& h = li.first_moment;
    Vec3 f = li.mass * m.vd + m.wd.cross(h) + m.w.cross(m.w.cross(h));
    Vec3 nn = inertia * m.wd + m.w.cross(inertia * m.w) + h.cross(m.vd);
    if (i + 1 < n) {
      const Vec3 f_child = frames[i + 1].rot * f_next;
      f += f_child;
      nn += frames[i + 1].rot * n_next + frames[i + 1].pos.cross(f_child);
    }
    tau[i] = nn.z();
    f_next = f;
    n_next = nn;
  }
  return tau;
}

DynamicsTerms inverse_dynamics(const RobotModel& model, const InertialParams& params,
                               const JointState& state) {
  check_state(model, state);
  if (params.joint_count() != model.joint_count() ||
      params.vector().size() != model.joint_count() * kParamsPerLink) {
    throw ContractError("inverse_dynamics: parameter vector does not match the model");
  }
  const int n = model.joint_count();
  const Vec3 no_gravity = Vec3::Zero();
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(n);

  DynamicsTerms out;
  out.inertia.resize(n, n);
  JointState probe{state.q, zeros, zeros};
  for (int k = 0; k < n; ++k) {
    probe.qdd = Eigen::VectorXd::Unit(n, k);
    out.inertia.col(k) = rnea(model, params, probe, no_gravity);
  }
  out.coriolis = rnea(model, params, JointState{state.q, state.qd, zeros}, no_gravity);
  out.gravity = rnea(model, params, JointState{state.q, zeros, zeros}, model.gravity);
  out.friction = friction_torque(params, state.qd);
  out.tau = rnea(model, params, state, model.gravity) + out.friction;
  return out;
}

void compute_regressor(const RobotModel& model, const JointState& state,
                       Eigen::Ref<Eigen::MatrixXd> out) {
  check_state(model, state);
  const int n = model.joint_count();
  if (out.rows() != n || out.cols() != n * kParamsPerLink) {
    throw ContractError("compute_regressor: output block has the wrong shape");
  }
  std::vector<JointFrame> frames;
  std::vector<Motion> motion;
  forward_pass(model, state, model.gravity, frames, motion);

  out.setZero();
  LinkBlock af, an;
  for (int j = 0; j < n; ++j) {
    const Motion& m = motion[j];
    const Mat3 sw = skew(m.w);
    // Wrench of link j about its own origin, linear in (m, h, I).
    af.col(0) = m.vd;
    af.block<3, 3>(0, 1) = skew(m.wd) + sw * sw;
    af.rightCols<6>().setZero();
    an.col(0).setZero();
    an.block<3, 3>(0, 1) = -skew(m.vd);
    an.rightCols<6>() = inertia_map(m.wd) + sw * inertia_map(m.w);
    for (int i = j; i >= 0; --i) {
      out.block<1, 10>(i, j * kParamsPerLink) = an.row(2);
      if (i > 0) {
        const LinkBlock af_parent = frames[i].rot * af;
        an = frames[i].rot * an + skew(frames[i].pos) * af_parent;
        af = af_parent;
      }
    }
    out(j, j * kParamsPerLink + 10) = state.qd[j];
    out(j, j * kParamsPerLink + 11) = std::tanh(state.qd[j] / kCoulombSmoothing);
  }
}

Eigen::MatrixXd compute_regressor(const RobotModel& model, const JointState& state) {
  Eigen::MatrixXd y(model.joint_count(), model.joint_count() * kParamsPerLink);
  compute_regressor(model, state, y);
  return y;
}

}  // namespace excite
