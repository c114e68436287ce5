#include "qklab/errors.hpp"

#include <sstream>

namespace qklab {

EvaluationError::EvaluationError(const std::string& what, std::vector<double> point)
    : std::runtime_error(what + " at " + format_point(point)), point_(std::move(point)) {}

VerificationError::VerificationError(const std::string& what, double residual,
                                     std::vector<double> point)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + " at " +
                         format_point(point) + ")"),
      residual_(residual),
      point_(std::move(point)) {}

std::string format_point(const std::vector<double>& point) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (i) os << ", ";
    os << point[i];
  }
  os << ')';
  return os.str();
}

}  // namespace qklab
