#pragma once

#include <stdexcept>
#include <string>

namespace kw {

// Shape/grid mismatch between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the operator's domain (negative time, ball larger than torus, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularOperatorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConstraintError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature did not reach the requested tolerance; carries the Richardson estimate.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

class VacuumError : public std::runtime_error {
 public:
  VacuumError(const std::string& what, double min_density)
      : std::runtime_error(what), min_density_(min_density) {}
  double min_density() const { return min_density_; }

 private:
  double min_density_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kw
