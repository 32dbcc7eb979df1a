#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ddcalc {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (negative log argument, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition (shape mismatch, bad spec).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A ScalarFunction cannot supply the derivative order or complex extension
// that an algorithm needs.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Contour does not enclose the nodes or touches a singularity.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Iterative numerics (eigen solver) failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An adaptive method ran out of budget before reaching its tolerance.
// Carries the best available estimate and its error estimate.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double estimate, double error_estimate);

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

// A contraction kernel produced a non-finite value at an eigenvalue tuple.
class KernelSingularityError : public Error {
 public:
  explicit KernelSingularityError(std::vector<double> tuple);

  const std::vector<double>& tuple() const noexcept { return tuple_; }

 private:
  std::vector<double> tuple_;
};

}  // namespace ddcalc
