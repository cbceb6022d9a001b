#include "excite/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "excite/error.hpp"

namespace excite {

ConstraintSet ConstraintSet::from_model(const RobotModel& model) {
  ConstraintSet cs;
  cs.halfspaces = model.constraints.halfspaces;
  if (cs.halfspaces.empty()) cs.halfspaces.push_back({Eigen::Vector3d::UnitZ(), 0.10, 1});
  cs.collision_margin = model.constraints.collision_margin;
  for (int i = 0; i + 1 < model.joint_count(); ++i) cs.exempt_pairs.emplace_back(i, i + 1);
  for (auto [a, b] : model.constraints.exempt_pairs) {
    cs.exempt_pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  return cs;
}

bool ConstraintSet::exempt(int a, int b) const {
  const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
  if (key.second - key.first <= 1) return true;
  return std::find(exempt_pairs.begin(), exempt_pairs.end(), key) != exempt_pairs.end();
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::none:
      return "none";
    case ViolationKind::limit:
      return "limit";
    case ViolationKind::workspace:
      return "workspace";
    case ViolationKind::collision:
      return "collision";
  }
  return "none";
}

ViolationKind violation_from_string(std::string_view text) {
  if (text == "none") return ViolationKind::none;
  if (text == "limit") return ViolationKind::limit;
  if (text == "workspace") return ViolationKind::workspace;
  if (text == "collision") return ViolationKind::collision;
  throw FormatError("unknown violation kind '" + std::string(text) + "'");
}

double segment_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                        const Eigen::Vector3d& q0, const Eigen::Vector3d& q1) {
  // Closest points of two segments (Ericson, Real-Time Collision Detection 5.1.9).
  constexpr double eps = 1e-14;
  const Eigen::Vector3d d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= eps && e <= eps) return r.norm();
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > eps * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> capsule_endpoints(const RobotModel& model,
                                                                           const Eigen::VectorXd& q) {
  const auto poses = link_poses(model, q);
  std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> ends;
  ends.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Capsule& c = model.joints[i].capsule;
    ends.emplace_back(poses[i] * c.p0, poses[i] * c.p1);
  }
  return ends;
}

ConstraintScan scan(const SampledTrajectory& traj, const RobotModel& model, const ConstraintSet& cs) {
  const int joints = model.joint_count();
  if (traj.joints() != joints) throw ContractError("constraint check: joint count mismatch");

  ConstraintScan out;
  ValidityReport& rep = out.report;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  auto flag = [&rep](std::size_t k, ViolationKind kind, int a, int b) {
    if (!rep.valid) return;
    rep.valid = false;
    rep.kind = kind;
    rep.sample = static_cast<std::ptrdiff_t>(k);
    rep.joint = a;
    rep.other_link = b;
  };

  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < joints; ++a) {
    for (int b = a + 2; b < joints; ++b) {
      if (!cs.exempt(a, b)) pairs.emplace_back(a, b);
    }
  }
  std::vector<Eigen::Vector3d> normals;
  for (const auto& h : cs.halfspaces) normals.push_back(h.normal.normalized());

  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    // Limits.
    int limit_joint = -1;
    for (int j = 0; j < joints; ++j) {
      const auto& js = model.joints[j];
      const double q = traj.q(r, j), qd = traj.qd(r, j), qdd = traj.qdd(r, j);
      const double excess[] = {std::max(0.0, js.q_min - q), std::max(0.0, q - js.q_max),
                               std::max(0.0, std::abs(qd) - js.qd_max),
                               std::max(0.0, std::abs(qdd) - js.qdd_max)};
      for (double x : excess) {
        if (x > 0.0) {
          out.penalty += x * x;
          if (limit_joint < 0) limit_joint = j;
        }
      }
    }
    if (limit_joint >= 0) flag(k, ViolationKind::limit, limit_joint, -1);

    const auto ends = capsule_endpoints(model, traj.q.row(r).transpose());
    // Workspace half-spaces (capsule endpoints, radius included).
    int ws_link = -1;
    for (std::size_t h = 0; h < cs.halfspaces.size(); ++h) {
      for (int i = std::max(0, cs.halfspaces[h].first_link); i < joints; ++i) {
        const double radius = model.joints[i].capsule.radius;
        for (const Eigen::Vector3d* p : {&ends[i].first, &ends[i].second}) {
          const double margin = normals[h].dot(*p) - radius - cs.halfspaces[h].offset;
          rep.worst_margin = std::min(rep.worst_margin, margin);
          if (margin < 0.0) {
            out.penalty += margin * margin;
            if (ws_link < 0) ws_link = i;
          }
        }
      }
    }
    if (ws_link >= 0) flag(k, ViolationKind::workspace, ws_link, -1);

    // Capsule self-collision.
    std::pair<int, int> hit{-1, -1};
    for (auto [a, b] : pairs) {
      const double dist = segment_distance(ends[a].first, ends[a].second, ends[b].first, ends[b].second);
      const double margin =
          dist - model.joints[a].capsule.radius - model.joints[b].capsule.radius - cs.collision_margin;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < 0.0) {
        out.penalty += margin * margin;
        if (hit.first < 0) hit = {a, b};
      }
    }
    if (hit.first >= 0) flag(k, ViolationKind::collision, hit.first, hit.second);
  }
  if (!std::isfinite(rep.worst_margin)) rep.worst_margin = 0.0;
  return out;
}

ValidityReport check(const SampledTrajectory& traj, const RobotModel& model, const ConstraintSet& cs) {
  return scan(traj, model, cs).report;
}

double violation_penalty(const SampledTrajectory& traj, const RobotModel& model,
                         const ConstraintSet& cs) {
  return scan(traj, model, cs).penalty;
}

}  // namespace excite
