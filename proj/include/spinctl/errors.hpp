#pragma once

#include <stdexcept>
#include <string>

namespace spinctl {

// Bad input: wrong dimensions, out-of-range indices, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A unitary has an eigenvalue too close to -1 for the principal logarithm.
// Callers can apply a small global phase and retry.
class BranchCutError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Eigen-solver failures and similar breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Correlation requested between states whose traceless part vanishes.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace spinctl
