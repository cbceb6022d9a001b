#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <limits>

namespace oracle {

/// Distance between two segments by dense sampling of the first and exact
/// projection onto the second.
inline double segment_distance(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                               const Eigen::Vector3d& q0, const Eigen::Vector3d& q1,
                               int samples = 20000) {
  const Eigen::Vector3d d = q1 - q0;
  const double dd = d.squaredNorm();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const Eigen::Vector3d x = p0 + (p1 - p0) * (static_cast<double>(i) / samples);
    const double t = dd > 0.0 ? std::clamp((x - q0).dot(d) / dd, 0.0, 1.0) : 0.0;
    best = std::min(best, (x - (q0 + t * d)).norm());
  }
  return best;
}

}  // namespace oracle
