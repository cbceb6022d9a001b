#pragma once

#include <stdexcept>
#include <string>

namespace excite {

/// Raised when a caller breaks an operation's preconditions (shape mismatch,
/// out-of-range argument, inconsistent configuration).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the numerical problem itself is ill-posed: rank deficiency,
/// ambiguous rank detection, infeasible bridge segment.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, mismatched or corrupt files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace excite
