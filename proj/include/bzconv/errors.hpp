#pragma once

#include <stdexcept>
#include <string>

namespace bzconv {

/// Base class of every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateLatticeError : public Error {
 public:
  using Error::Error;
};

/// A requested object would exceed a configured size cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class NeutralityError : public Error {
 public:
  using Error::Error;
};

/// The gap between occupied and unoccupied bands closed (or fell below the
/// configured tolerance); nothing downstream is defined in that regime.
class MetallicError : public Error {
 public:
  MetallicError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double last_residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace bzconv
