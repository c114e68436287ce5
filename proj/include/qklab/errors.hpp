#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qklab {

/// Bad call-site input: index out of range, dimension mismatch, missing data.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by jet arithmetic when a function leaves its domain (ln of a
/// nonpositive value, division by zero, ...). Field evaluation rethrows it as
/// an EvaluationError that carries the chart point.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::vector<double> point);

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// A constructor rejected its input (non-harmonic potential, curvature
/// outside sp(n), wrong Killing kind, ...).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A defining identity failed beyond tolerance; carries the worst point.
class VerificationError : public std::runtime_error {
 public:
  VerificationError(const std::string& what, double residual, std::vector<double> point);

  double residual() const noexcept { return residual_; }
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  double residual_;
  std::vector<double> point_;
};

std::string format_point(const std::vector<double>& point);

}  // namespace qklab
