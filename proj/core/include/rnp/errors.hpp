#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace rnp {

/// Thrown when an iterative solver fails to reach its tolerance.
/// Carries the last residual and the iteration count at abort.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what + " (residual=" + format(residual) +
                           ", iterations=" + std::to_string(iterations) + ")"),
        residual(residual),
        iterations(iterations) {}

  double residual;
  int iterations;

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6e", v);
    return buf;
  }
};

}  // namespace rnp
