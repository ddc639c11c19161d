#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace circcoords {

/// Base class for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVarianceError : public Error {
 public:
  using Error::Error;
};

/// No dimension-1 class was found; the data does not support a circular
/// coordinate at the explored scales.
class NoLoopDetected : public Error {
 public:
  using Error::Error;
};

class RipsCapacityError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class EmptyDomainError : public Error {
 public:
  using Error::Error;
};

/// Fewer than two subsample coordinates survived in a corrected run.
class DegenerateEnsemble : public Error {
 public:
  DegenerateEnsemble(const std::string& what, std::vector<std::string> diagnostics)
      : Error(what), diagnostics_(std::move(diagnostics)) {}
  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

}  // namespace circcoords
