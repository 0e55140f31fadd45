#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace hok {

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved_)
      : std::runtime_error(what), achieved(achieved_) {}
  double achieved;  // worst unresolved local error estimate
};

// Adaptive Simpson integration with interval bisection. Throws
// QuadratureError when some subinterval still exceeds its error budget at
// max_depth; the exception carries the achieved tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 40);

}  // namespace hok
