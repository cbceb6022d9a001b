#include "excite/fitness.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <sstream>

#include "excite/error.hpp"

namespace excite {

std::string FitnessValue::describe() const {
  std::ostringstream s;
  switch (status) {
    case Status::ok:
      s.precision(17);
      s << value;
      break;
    case Status::unidentifiable:
      s << "unidentifiable";
      break;
    case Status::unexcited:
      s << "unexcited parameter " << index;
      break;
  }
  return s.str();
}

FitnessValue fitness_from_eigenvalues(const Eigen::VectorXd& descending) {
  if (descending.size() == 0) return {FitnessValue::Status::unidentifiable, 0.0, -1};
  const double hi = descending[0];
  const double lo = descending[descending.size() - 1];
  if (!(hi > 0.0) || !(lo >= kUnidentifiableRatio * hi)) {
    return {FitnessValue::Status::unidentifiable, 0.0, -1};
  }
  return {FitnessValue::Status::ok, hi / lo, -1};
}

FitnessValue fitness_from_diagonal(const Eigen::VectorXd& psi) {
  if (psi.size() == 0) return {FitnessValue::Status::unexcited, 0.0, 0};
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    if (!(psi[k] > 0.0)) return {FitnessValue::Status::unexcited, 0.0, static_cast<int>(k)};
  }
  return {FitnessValue::Status::ok, psi.maxCoeff() / psi.minCoeff(), -1};
}

Eigen::VectorXd gram_eigenvalues(const RegressorStack& stack) {
  const Eigen::Index b = stack.y.cols();
  if (stack.y.rows() < b) {
    throw ContractError("eigenvalue_fitness: stack has fewer rows than base parameters");
  }
  // sigma(Y) == sigma(R) for Y = QR; the SVD of the small R is cheap and
  // keeps the accuracy of working on Y rather than on Y^T Y.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(stack.y));
  const Eigen::MatrixXd r = qr.matrixQR().topRows(b).template triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
  return svd.singularValues().array().square();
}

FitnessValue eigenvalue_fitness(const RegressorStack& stack) {
  return fitness_from_eigenvalues(gram_eigenvalues(stack));
}

Eigen::VectorXd excitation_vector(const RegressorStack& stack) {
  return stack.y.colwise().squaredNorm().transpose();
}

FitnessValue diagonal_fitness(const RegressorStack& stack) {
  return fitness_from_diagonal(excitation_vector(stack));
}

ExcitationSummary summarize(const RegressorStack& stack) {
  ExcitationSummary s;
  s.eigenvalues = gram_eigenvalues(stack);
  s.psi = excitation_vector(stack);
  s.eigenvalue_fitness = fitness_from_eigenvalues(s.eigenvalues);
  s.diagonal_fitness = fitness_from_diagonal(s.psi);
  return s;
}

namespace {

Eigen::VectorXd descending_eigenvalues(const Eigen::MatrixXd& gram) {
  if (gram.rows() != gram.cols()) throw ContractError("gram matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  // Ascending from Eigen; round-off can push tiny ones below zero.
  Eigen::VectorXd ev = eig.eigenvalues().reverse();
  return ev.cwiseMax(0.0);
}

}  // namespace

FitnessValue eigenvalue_fitness_from_gram(const Eigen::MatrixXd& gram) {
  return fitness_from_eigenvalues(descending_eigenvalues(gram));
}

FitnessValue diagonal_fitness_from_gram(const Eigen::MatrixXd& gram) {
  return fitness_from_diagonal(gram.diagonal());
}

ExcitationSummary summarize_gram(const Eigen::MatrixXd& gram) {
  ExcitationSummary s;
  s.eigenvalues = descending_eigenvalues(gram);
  s.psi = gram.diagonal();
  s.eigenvalue_fitness = fitness_from_eigenvalues(s.eigenvalues);
  s.diagonal_fitness = fitness_from_diagonal(s.psi);
  return s;
}

}  // namespace excite
