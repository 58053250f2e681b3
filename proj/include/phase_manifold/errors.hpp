#pragma once

#include <stdexcept>
#include <string>

namespace phase_manifold {

// Numerical failures (quadrature, optimizers, eigen-solvers). CLI maps these
// to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Usage errors. CLI maps these to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateBracket : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class BadBracket : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InfeasiblePoint : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

}  // namespace phase_manifold
