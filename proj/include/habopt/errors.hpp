#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace habopt {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field was used with a grid it does not live on.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// The shifted linear system is singular or too ill-conditioned to meet the
/// residual contract. Callers must treat this as a hard failure.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to converge. Carries the residual history of
/// the failed run for diagnostics.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> residual_history)
      : Error(msg), residual_history(std::move(residual_history)) {}
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}

  std::vector<double> residual_history;
};

/// Invalid scenario configuration; names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field_path, const std::string& msg)
      : Error("config field '" + field_path + "': " + msg),
        field(std::move(field_path)) {}

  std::string field;
};

}  // namespace habopt
