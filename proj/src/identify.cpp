#include "excite/identify.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "excite/error.hpp"

namespace excite {

Eigen::VectorXd batch_identify(const RegressorStack& stack) {
  const Eigen::Index b = stack.y.cols();
  if (stack.y.rows() < b || b == 0) {
    throw ContractError("batch_identify: stack needs at least as many rows as base parameters");
  }
  if (stack.tau.size() != stack.y.rows()) throw ContractError("batch_identify: torque length mismatch");

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(stack.y));
  const Eigen::MatrixXd r = qr.matrixQR().topRows(b).triangularView<Eigen::Upper>();
  const Eigen::VectorXd qt_tau = (qr.householderQ().transpose() * stack.tau).head(b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (!(sigma[0] > 0.0) || sigma[b - 1] < kRankDeficientRatio * sigma[0]) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "batch_identify: rank-deficient stack, sigma_max = " << sigma[0] << ", smallest:";
    for (Eigen::Index k = std::max<Eigen::Index>(0, b - 3); k < b; ++k) msg << ' ' << sigma[k];
    throw NumericalError(msg.str());
  }
  return svd.matrixV() * (svd.matrixU().transpose() * qt_tau).cwiseQuotient(sigma);
}

Eigen::VectorXd regularized_identify(const RegressorStack& stack, double delta) {
  if (!(delta > 0.0)) throw ContractError("regularized_identify: delta must be > 0");
  Eigen::MatrixXd normal = gram(stack);
  normal.diagonal().array() += 1.0 / delta;
  return normal.ldlt().solve(stack.y.transpose() * stack.tau);
}

IdentState IdentState::initial(int base_count, double delta, double forgetting) {
  if (base_count < 1 || !(delta > 0.0) || !(forgetting > 0.0 && forgetting <= 1.0)) {
    throw ContractError("IdentState: need b >= 1, delta > 0 and forgetting in (0, 1]");
  }
  IdentState s;
  s.estimate = Eigen::VectorXd::Zero(base_count);
  s.covariance = delta * Eigen::MatrixXd::Identity(base_count, base_count);
  s.forgetting = forgetting;
  return s;
}

void rls_update(IdentState& state, const Eigen::Ref<const RowMatrix>& rows,
                const Eigen::Ref<const Eigen::VectorXd>& tau) {
  const Eigen::Index b = state.estimate.size();
  if (rows.cols() != b || rows.rows() != tau.size()) throw ContractError("rls_update: shape mismatch");
  if (!rows.allFinite() || !tau.allFinite()) throw ContractError("rls_update: non-finite input");
  const double lambda = state.forgetting;
  const Eigen::MatrixXd& p = state.covariance;

  const Eigen::MatrixXd pyt = p * rows.transpose();  // b x m
  Eigen::MatrixXd s = rows * pyt;                     // m x m
  s.diagonal().array() += lambda;
  const Eigen::MatrixXd gain = s.ldlt().solve(pyt.transpose()).transpose();  // b x m

  state.estimate += gain * (tau - rows * state.estimate);
  Eigen::MatrixXd a = -gain * rows;
  a.diagonal().array() += 1.0;
  Eigen::MatrixXd next = a * p * a.transpose() + lambda * gain * gain.transpose();
  next /= lambda;
  state.covariance = 0.5 * (next + next.transpose());
  ++state.samples;
}

void rls_update(IdentState& state, const RegressorStack& stack) {
  const Eigen::Index j = stack.joints;
  for (std::size_t k = 0; k < stack.samples(); ++k) {
    const auto row = static_cast<Eigen::Index>(k) * j;
    rls_update(state, stack.y.middleRows(row, j), stack.tau.segment(row, j));
  }
}

Eigen::VectorXd predict_torque(const RobotModel& model, const BaseProjection& projection,
                               const Eigen::VectorXd& estimate, const JointState& state) {
  if (estimate.size() != projection.base_count()) {
    throw ContractError("predict_torque: estimate length differs from the base parameter count");
  }
  return base_regressor(projection, compute_regressor(model, state)) * estimate;
}

Eigen::MatrixXd predict_torques(const RobotModel& model, const BaseProjection& projection,
                                const Eigen::VectorXd& estimate, const MeasuredRun& run) {
  Eigen::MatrixXd out(run.q.rows(), run.joints());
  for (Eigen::Index k = 0; k < run.q.rows(); ++k) {
    const JointState s{run.q.row(k).transpose(), run.qd.row(k).transpose(), run.qdd.row(k).transpose()};
    out.row(k) = predict_torque(model, projection, estimate, s).transpose();
  }
  return out;
}

EvalReport normalized_errors(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& measured) {
  if (predicted.rows() != measured.rows() || predicted.cols() != measured.cols() || measured.rows() == 0) {
    throw ContractError("normalized_errors: prediction and measurement shapes differ");
  }
  EvalReport rep;
  const auto n = static_cast<double>(measured.rows());
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index j = 0; j < measured.cols(); ++j) {
    const double mean = measured.col(j).mean();
    const double var = (measured.col(j).array() - mean).square().sum() / n;
    if (!(var > 1e-18)) {
      rep.nmse.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.warnings.push_back("joint " + std::to_string(j) +
                             ": measured torque has zero variance, excluded from the average");
      continue;
    }
    const double mse = (predicted.col(j) - measured.col(j)).squaredNorm() / n;
    rep.nmse.push_back(mse / var);
    sum += mse / var;
    ++used;
  }
  rep.average_nmse = used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

EvalReport evaluate(const RobotModel& model, const BaseProjection& projection,
                    const Eigen::VectorXd& estimate, const MeasuredRun& test, const IdentState* state) {
  EvalReport rep = normalized_errors(predict_torques(model, projection, estimate, test), test.tau);
  if (state != nullptr) rep.covariance_norm = state->covariance.diagonal().norm();
  return rep;
}

}  // namespace excite
