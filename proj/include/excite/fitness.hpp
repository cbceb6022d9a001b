#pragma once

#include <Eigen/Core>
#include <string>

#include "excite/regressor_stack.hpp"

namespace excite {

/// A fitness number or the reason it is undefined. Lower values are better.
struct FitnessValue {
  enum class Status { ok, unidentifiable, unexcited };
  Status status = Status::ok;
  double value = 0.0;
  int index = -1;  // first unexcited parameter for Status::unexcited

  bool ok() const { return status == Status::ok; }
  std::string describe() const;
};

/// Smallest/largest eigenvalue ratio below which Y^T Y counts as singular.
inline constexpr double kUnidentifiableRatio = 1e-14;

struct ExcitationSummary {
  Eigen::VectorXd eigenvalues;  // of Y^T Y, descending
  Eigen::VectorXd psi;          // diag(Y^T Y)
  FitnessValue eigenvalue_fitness;
  FitnessValue diagonal_fitness;
};

/// sigma_max^2 / sigma_min^2 of the stacked base regressor (singular values
/// via QR + SVD of R). Requires rows >= b.
FitnessValue eigenvalue_fitness(const RegressorStack& stack);

/// max(diag(Y^T Y)) / min(diag(Y^T Y)).
FitnessValue diagonal_fitness(const RegressorStack& stack);

/// diag(Y^T Y) = squared column norms.
Eigen::VectorXd excitation_vector(const RegressorStack& stack);

/// Singular values of Y squared, descending.
Eigen::VectorXd gram_eigenvalues(const RegressorStack& stack);

ExcitationSummary summarize(const RegressorStack& stack);

// Gram-based variants, for sums of per-trajectory Grams (stacking is additive
// in Y^T Y) and for the optimizer's inner loop. Eigenvalues come from a
// symmetric eigensolver, so condition numbers near 1/eps lose accuracy.
FitnessValue eigenvalue_fitness_from_gram(const Eigen::MatrixXd& gram);
FitnessValue diagonal_fitness_from_gram(const Eigen::MatrixXd& gram);
ExcitationSummary summarize_gram(const Eigen::MatrixXd& gram);

FitnessValue fitness_from_eigenvalues(const Eigen::VectorXd& descending);
FitnessValue fitness_from_diagonal(const Eigen::VectorXd& psi);

}  // namespace excite
