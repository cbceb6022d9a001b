#include "excite/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "excite/error.hpp"
#include "excite/kernels.hpp"

namespace excite {

Quintic Quintic::boundary(double x0, double v0, double a0, double x1, double v1, double a1,
                          double duration) {
  const double t = duration;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double dx = x1 - x0;
  Quintic p;
  p.c[0] = x0;
  p.c[1] = v0;
  p.c[2] = 0.5 * a0;
  p.c[3] = (20.0 * dx - (8.0 * v1 + 12.0 * v0) * t - (3.0 * a0 - a1) * t2) / (2.0 * t3);
  p.c[4] = (-30.0 * dx + (14.0 * v1 + 16.0 * v0) * t + (3.0 * a0 - 2.0 * a1) * t2) / (2.0 * t4);
  p.c[5] = (12.0 * dx - 6.0 * (v1 + v0) * t - (a0 - a1) * t2) / (2.0 * t5);
  return p;
}

double Quintic::position(double t) const {
  return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
}

double Quintic::velocity(double t) const {
  return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
}

double Quintic::acceleration(double t) const {
  return 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
}

double FourierTrajectory::omega() const { return 2.0 * std::numbers::pi / duration_; }

JointState FourierTrajectory::state_at(double t) const {
  JointState s{Eigen::VectorXd(joints_), Eigen::VectorXd(joints_), Eigen::VectorXd(joints_)};
  const double w = omega();
  for (int j = 0; j < joints_; ++j) {
    double pos = offsets_[j], vel = 0.0, acc = 0.0;
    for (int l = 0; l < harmonics_; ++l) {
      const double wl = w * (l + 1);
      const double a = sine_coef(j, l), b = cosine_coef(j, l);
      const double sn = std::sin(wl * t), cs = std::cos(wl * t);
      pos += (a * sn - b * cs) / wl;
      vel += a * cs + b * sn;
      acc += wl * (b * cs - a * sn);
    }
    const Quintic& p = correction_[j];
    s.q[j] = pos + p.position(t);
    s.qd[j] = vel + p.velocity(t);
    s.qdd[j] = acc + p.acceleration(t);
  }
  return s;
}

FourierTrajectory build_trajectory(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& offsets,
                                   int harmonics, double duration) {
  const auto joints = static_cast<int>(offsets.size());
  if (joints < 1 || harmonics < 1) throw ContractError("build_trajectory: need J >= 1 and H >= 1");
  if (coeffs.size() != static_cast<Eigen::Index>(joints) * harmonics * 2) {
    throw ContractError("build_trajectory: coefficient tensor must have J*H*2 = " +
                        std::to_string(joints * harmonics * 2) + " entries, got " +
                        std::to_string(coeffs.size()));
  }
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ContractError("build_trajectory: duration must be positive");
  }
  if (!coeffs.allFinite() || !offsets.allFinite()) {
    throw ContractError("build_trajectory: non-finite coefficients or offsets");
  }
  FourierTrajectory tr;
  tr.joints_ = joints;
  tr.harmonics_ = harmonics;
  tr.duration_ = duration;
  tr.coeffs_ = coeffs;
  tr.offsets_ = offsets;
  tr.correction_.resize(joints);
  const double w = tr.omega();
  for (int j = 0; j < joints; ++j) {
    // Fourier part at t = 0; by periodicity the same values hold at t = T.
    double f0 = 0.0, v0 = 0.0, a0 = 0.0;
    for (int l = 0; l < harmonics; ++l) {
      const double wl = w * (l + 1);
      f0 -= tr.cosine_coef(j, l) / wl;
      v0 += tr.sine_coef(j, l);
      a0 += tr.cosine_coef(j, l) * wl;
    }
    tr.correction_[j] = Quintic::boundary(-f0, -v0, -a0, -f0, -v0, -a0, duration);
  }
  return tr;
}

JointState SampledTrajectory::state(std::size_t k) const {
  const auto r = static_cast<Eigen::Index>(k);
  return JointState{q.row(r).transpose(), qd.row(r).transpose(), qdd.row(r).transpose()};
}

namespace {

std::size_t sample_count(double duration, double rate_hz) {
  if (!(rate_hz > 0.0)) throw ContractError("sample: rate_hz must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(duration * rate_hz));
  if (n < 2) throw ContractError("sample: fewer than two samples at this rate");
  return n;
}

void fill(const FourierTrajectory& traj, std::size_t n, double dt, SampledTrajectory& out,
          std::size_t row0) {
  std::vector<double> sin_coef(traj.harmonics()), cos_coef(traj.harmonics());
  std::vector<double> q(n), qd(n), qdd(n);
  for (int j = 0; j < traj.joints(); ++j) {
    for (int l = 0; l < traj.harmonics(); ++l) {
      sin_coef[l] = traj.sine_coef(j, l);
      cos_coef[l] = traj.cosine_coef(j, l);
    }
    kernels::fourier_series({sin_coef, cos_coef, traj.omega()}, 0.0, dt, q, qd, qdd);
    const Quintic& p = traj.correction(j);
    const double q0 = traj.offsets()[j];
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) * dt;
      const auto r = static_cast<Eigen::Index>(row0 + k);
      out.q(r, j) = q0 + q[k] + p.position(t);
      out.qd(r, j) = qd[k] + p.velocity(t);
      out.qdd(r, j) = qdd[k] + p.acceleration(t);
    }
  }
}

}  // namespace

SampledTrajectory sample(const FourierTrajectory& traj, double rate_hz) {
  const std::size_t n = sample_count(traj.duration(), rate_hz);
  SampledTrajectory out;
  out.dt = traj.duration() / static_cast<double>(n - 1);
  out.q.resize(static_cast<Eigen::Index>(n), traj.joints());
  out.qd.resizeLike(out.q);
  out.qdd.resizeLike(out.q);
  fill(traj, n, out.dt, out, 0);
  out.source = "fourier";
  out.segments.push_back({Segment::Kind::trajectory, 0, n, 0});
  return out;
}

double bridge_duration(double distance, double qd_max, double qdd_max) {
  const double d = std::abs(distance);
  if (d == 0.0) return 0.0;
  // Rest-to-rest quintic peaks: |qd| = 15 d / (8 T), |qdd| = 10 d / (sqrt(3) T^2).
  return std::max(15.0 * d / (8.0 * qd_max), std::sqrt(10.0 * d / (std::sqrt(3.0) * qdd_max)));
}

SampledTrajectory concatenate(std::span<const FourierTrajectory> trajs, double rate_hz,
                              const RobotModel& model) {
  if (trajs.empty()) throw ContractError("concatenate: no trajectories given");
  const int joints = trajs.front().joints();
  if (joints != model.joint_count()) {
    throw ContractError("concatenate: trajectories do not match the model joint count");
  }
  std::vector<std::size_t> counts;
  double dt = 0.0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    if (trajs[i].joints() != joints) throw ContractError("concatenate: joint counts differ");
    const std::size_t n = sample_count(trajs[i].duration(), rate_hz);
    const double dti = trajs[i].duration() / static_cast<double>(n - 1);
    if (i == 0) dt = dti;
    if (std::abs(dti - dt) > 1e-12 * dt) {
      throw ContractError("concatenate: trajectories sample onto different grids");
    }
    counts.push_back(n);
  }

  struct Bridge {
    std::size_t samples = 0;  // interior samples
    double duration = 0.0;
    std::vector<Quintic> poly;
  };
  std::vector<Bridge> bridges(trajs.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    total += counts[i];
    if (i == 0) continue;
    const Eigen::VectorXd& from = trajs[i - 1].offsets();
    const Eigen::VectorXd& to = trajs[i].offsets();
    if (from == to) continue;
    double needed = 0.0;
    for (int j = 0; j < joints; ++j) {
      const auto& js = model.joints[j];
      for (double x : {from[j], to[j]}) {
        if (x < js.q_min || x > js.q_max) {
          throw NumericalError("concatenate: bridge infeasible for joint " + std::to_string(j) +
                               " ('" + js.name + "'): endpoint outside position limits");
        }
      }
      if (!(js.qd_max > 0.0) || !(js.qdd_max > 0.0)) {
        throw NumericalError("concatenate: bridge infeasible for joint " + std::to_string(j) +
                             " ('" + js.name + "'): non-positive limits");
      }
      needed = std::max(needed, bridge_duration(to[j] - from[j], js.qd_max, js.qdd_max));
    }
    const auto steps = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(needed / dt - 1e-9)));
    Bridge& b = bridges[i];
    b.duration = static_cast<double>(steps) * dt;
    b.samples = steps - 1;
    for (int j = 0; j < joints; ++j) {
      b.poly.push_back(Quintic::boundary(from[j], 0.0, 0.0, to[j], 0.0, 0.0, b.duration));
    }
    total += b.samples;
  }

  SampledTrajectory out;
  out.dt = dt;
  out.q.resize(static_cast<Eigen::Index>(total), joints);
  out.qd.resizeLike(out.q);
  out.qdd.resizeLike(out.q);
  out.source = "concatenation";
  std::size_t row = 0;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const Bridge& b = bridges[i];
    if (b.samples > 0) {
      for (std::size_t k = 1; k <= b.samples; ++k) {
        const double t = static_cast<double>(k) * dt;
        const auto r = static_cast<Eigen::Index>(row + k - 1);
        for (int j = 0; j < joints; ++j) {
          out.q(r, j) = b.poly[j].position(t);
          out.qd(r, j) = b.poly[j].velocity(t);
          out.qdd(r, j) = b.poly[j].acceleration(t);
        }
      }
      out.segments.push_back({Segment::Kind::bridge, row, b.samples, static_cast<int>(i)});
      row += b.samples;
    }
    fill(trajs[i], counts[i], dt, out, row);
    out.segments.push_back({Segment::Kind::trajectory, row, counts[i], static_cast<int>(i)});
    row += counts[i];
  }
  return out;
}

}  // namespace excite
