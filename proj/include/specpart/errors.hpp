#pragma once

#include <stdexcept>
#include <string>

namespace specpart {

/// Base of every error raised by the library. `kind()` is the stable
/// machine-readable name written to error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

  /// Numerical failures map to exit status 3, everything else to 2.
  virtual bool numerical() const noexcept { return false; }

 private:
  std::string kind_;
};

/// Invalid input: bad config, violated precondition, inconsistent grids.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("ValidationError", what) {}

 protected:
  ValidationError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};

#define SPECPART_VALIDATION_ERROR(Name)                                   \
  class Name : public ValidationError {                                   \
   public:                                                                \
    explicit Name(const std::string& what) : ValidationError(#Name, what) {} \
  }

SPECPART_VALIDATION_ERROR(EmptyMask);
SPECPART_VALIDATION_ERROR(GridMismatch);
SPECPART_VALIDATION_ERROR(BadRadii);
SPECPART_VALIDATION_ERROR(ZeroField);
SPECPART_VALIDATION_ERROR(OverlappingCells);
SPECPART_VALIDATION_ERROR(WindowTooSmall);
SPECPART_VALIDATION_ERROR(InsufficientSweep);
SPECPART_VALIDATION_ERROR(BracketInvalid);
SPECPART_VALIDATION_ERROR(NotConverged);

#undef SPECPART_VALIDATION_ERROR

class NumericalError : public Error {
 public:
  using Error::Error;
  bool numerical() const noexcept override { return true; }
};

class NoConvergence : public NumericalError {
 public:
  NoConvergence(int iterations, double residual)
      : NumericalError("NoConvergence", "no convergence after " + std::to_string(iterations) +
                                            " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class CellCollapse : public NumericalError {
 public:
  explicit CellCollapse(int cell)
      : NumericalError("CellCollapse", "cell " + std::to_string(cell) + " collapsed"), cell_(cell) {}

  int cell() const noexcept { return cell_; }

 private:
  int cell_;
};

}  // namespace specpart
