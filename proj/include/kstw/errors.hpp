#pragma once

#include <stdexcept>
#include <string>

namespace kstw {

// Root of every library error. Numerical failures derive from NumericalError,
// caller mistakes from ParameterError, so front ends can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// g_inverse evaluated at or beyond the saturation level.
class DomainError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// Zero eigenvalue, sigma == sigma_star and similar non-hyperbolic situations.
class DegenerateError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class AnchorMismatch : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class StepSizeUnderflow : public NumericalError {
 public:
  StepSizeUnderflow(const std::string& what, double s, double w, double v)
      : NumericalError(what), s(s), w(w), v(v) {}
  double s, w, v;  // last accepted state
};

class DenominatorVanished : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SignChange : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class Inconclusive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeedEscaped : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoDichotomy : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientResolution : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RegimeViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kstw
