#pragma once

#include <stdexcept>
#include <string>

namespace hyperns {

/// Base of every error raised by the library. Precondition violations by the
/// caller are reported as std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state or a refused time step.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Advective CFL bound violated; carries the largest admissible dt.
class CflError : public NumericalError {
 public:
  CflError(const std::string& what, double admissible_dt)
      : NumericalError(what), admissible_dt_(admissible_dt) {}
  double admissible_dt() const { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// A field violates one of the spectral-velocity invariants (Hermitian
/// symmetry, incompressibility, zero mean, zero Nyquist rows).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or file-format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hyperns
