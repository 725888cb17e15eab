#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rigidlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RIGIDLAB_ERROR(Name)              \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

RIGIDLAB_ERROR(ShapeError)
RIGIDLAB_ERROR(DomainError)
RIGIDLAB_ERROR(DimensionError)
RIGIDLAB_ERROR(ResolutionError)
RIGIDLAB_ERROR(SolvabilityError)
RIGIDLAB_ERROR(PreconditionError)
RIGIDLAB_ERROR(InputError)
RIGIDLAB_ERROR(ConsistencyError)
RIGIDLAB_ERROR(InconsistencyError)
RIGIDLAB_ERROR(DegenerateInputError)
RIGIDLAB_ERROR(PlacementError)

#undef RIGIDLAB_ERROR

/// Iterative solver failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual,
                   std::vector<double> history = {})
      : Error(what), iterations_(iterations), residual_(residual), history_(std::move(history)) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }
  const std::vector<double>& history() const { return history_; }

 private:
  int iterations_;
  double residual_;
  std::vector<double> history_;
};

/// Malformed configuration; carries the offending line and field path.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace rigidlab
