#include "ddcalc/errors.hpp"

#include <sstream>

namespace ddcalc {

ToleranceError::ToleranceError(const std::string& what, double estimate,
                               double error_estimate)
    : Error(what), estimate_(estimate), error_estimate_(error_estimate) {}

namespace {

std::string describe_tuple(const std::vector<double>& tuple) {
  std::ostringstream os;
  os.precision(17);
  os << "kernel is not finite at eigenvalue tuple (";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) os << ", ";
    os << tuple[i];
  }
  os << ")";
  return os.str();
}

}  // namespace

KernelSingularityError::KernelSingularityError(std::vector<double> tuple)
    : Error(describe_tuple(tuple)), tuple_(std::move(tuple)) {}

}  // namespace ddcalc
