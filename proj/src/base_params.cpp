#include "excite/base_params.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "excite/error.hpp"
#include "excite/rng.hpp"

namespace excite {

JointState random_state(const RobotModel& model, Rng& rng) {
  const int n = model.joint_count();
  JointState s{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    const auto& j = model.joints[i];
    s.q[i] = rng.uniform(j.q_min, j.q_max);
    s.qd[i] = rng.uniform(-j.qd_max, j.qd_max);
    s.qdd[i] = rng.uniform(-j.qdd_max, j.qdd_max);
  }
  return s;
}

Eigen::VectorXd BaseProjection::project(const Eigen::VectorXd& full) const {
  if (full.size() != full_count) {
    throw ContractError("BaseProjection::project: expected " + std::to_string(full_count) +
                        " parameters, got " + std::to_string(full.size()));
  }
  Eigen::VectorXd kept(independent.size()), dep(dependent.size());
  for (std::size_t k = 0; k < independent.size(); ++k) kept[k] = full[independent[k]];
  for (std::size_t k = 0; k < dependent.size(); ++k) dep[k] = full[dependent[k]];
  if (!dependent.empty()) kept += beta * dep;
  return kept;
}

Eigen::MatrixXd BaseProjection::matrix() const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(base_count(), full_count);
  for (int r = 0; r < base_count(); ++r) {
    k(r, independent[r]) = 1.0;
    for (std::size_t c = 0; c < dependent.size(); ++c) k(r, dependent[c]) += beta(r, c);
  }
  return k;
}

BaseProjection compute_base_projection(const RobotModel& model, std::uint64_t rng_seed,
                                       const BaseProjectionOptions& options) {
  model.validate();
  const int joints = model.joint_count();
  const int full = joints * kParamsPerLink;
  const int states = options.states > 0 ? options.states : std::max(5 * full, 100);

  Rng rng(rng_seed);
  Eigen::MatrixXd w(static_cast<Eigen::Index>(states) * joints, full);
  for (int s = 0; s < states; ++s) {
    compute_regressor(model, random_state(model, rng), w.middleRows(s * joints, joints));
  }

  // Normalize columns so the pivot ratios do not depend on parameter units.
  // Columns at round-off level are structural zeros; normalizing them would
  // turn noise into a full-rank direction.
  const double lo = options.tolerance / options.ambiguity_band;
  const double hi = options.tolerance * options.ambiguity_band;
  Eigen::MatrixXd scaled = w;
  const double largest = w.colwise().norm().maxCoeff();
  for (int c = 0; c < full; ++c) {
    const double norm = scaled.col(c).norm();
    const double ratio = norm / largest;
    if (ratio > lo && ratio < hi) {
      std::ostringstream msg;
      msg << "rank ambiguity: column " << c << " has relative norm " << ratio
          << ", inside the tolerance band";
      throw NumericalError(msg.str());
    }
    if (ratio <= lo) {
      scaled.col(c).setZero();
    } else {
      scaled.col(c) /= norm;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(full, full).template triangularView<Eigen::Upper>();

  BaseProjection proj;
  proj.full_count = full;
  const double lead = std::abs(r(0, 0));
  if (!(lead > 0.0)) throw NumericalError("base projection: regressor is identically zero");
  proj.pivot_ratios.resize(full);
  int rank = 0;
  for (int k = 0; k < full; ++k) {
    proj.pivot_ratios[k] = std::abs(r(k, k)) / lead;
    if (proj.pivot_ratios[k] >= options.tolerance) rank = k + 1;
  }
  for (int k = 0; k < full; ++k) {
    const double ratio = proj.pivot_ratios[k];
    if (ratio > lo && ratio < hi) {
      const double kept = rank > 0 ? proj.pivot_ratios[rank - 1] : 0.0;
      const double dropped = rank < full ? proj.pivot_ratios[rank] : 0.0;
      std::ostringstream msg;
      msg << "rank ambiguity: pivot ratio " << ratio << " at position " << k
          << " lies inside the tolerance band; singular-value gap "
          << (dropped > 0.0 ? kept / dropped : INFINITY) << " (last kept " << kept
          << ", first dropped " << dropped << ")";
      throw NumericalError(msg.str());
    }
  }

  // The pivoted QR fixes the rank; which columns stand for the base set is
  // chosen in index order (keep a column unless it lies in the span of the
  // ones before it), so the result does not depend on the sampled states.
  Eigen::HouseholderQR<Eigen::MatrixXd> ordered(scaled);
  const auto& packed = ordered.matrixQR();
  for (int c = 0; c < full; ++c) {
    const bool structural_zero = scaled.col(c).squaredNorm() == 0.0;
    const bool keep = !structural_zero && c < packed.rows() && std::abs(packed(c, c)) >= hi;
    (keep ? proj.independent : proj.dependent).push_back(c);
  }
  if (proj.base_count() != rank) {
    std::ostringstream msg;
    msg << "rank ambiguity: pivoted rank " << rank << " but " << proj.base_count()
        << " columns are independent in index order";
    throw NumericalError(msg.str());
  }

  if (!proj.dependent.empty()) {
    Eigen::MatrixXd w_ind(w.rows(), rank), w_dep(w.rows(), full - rank);
    for (int k = 0; k < rank; ++k) w_ind.col(k) = w.col(proj.independent[k]);
    for (int k = 0; k < full - rank; ++k) w_dep.col(k) = w.col(proj.dependent[k]);
    proj.beta = w_ind.colPivHouseholderQr().solve(w_dep);
    // Structural zeros come out at round-off level; clean them so the
    // projection is exact for parameters that never enter the torque.
    const double scale = std::max(1.0, proj.beta.cwiseAbs().maxCoeff());
    proj.beta = proj.beta.unaryExpr([scale](double v) { return std::abs(v) < 1e-12 * scale ? 0.0 : v; });
  } else {
    proj.beta.resize(rank, 0);
  }
  return proj;
}

Eigen::MatrixXd base_regressor(const BaseProjection& projection, const Eigen::MatrixXd& full) {
  if (full.cols() != projection.full_count) {
    throw ContractError("base_regressor: regressor has " + std::to_string(full.cols()) +
                        " columns but the projection expects " +
                        std::to_string(projection.full_count));
  }
  Eigen::MatrixXd yb(full.rows(), projection.base_count());
  for (int k = 0; k < projection.base_count(); ++k) yb.col(k) = full.col(projection.independent[k]);
  return yb;
}

}  // namespace excite
