#include "hok/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hok {
namespace {

double recurse(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm, double whole,
               double tol, int depth, double& worst_unresolved) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    worst_unresolved = std::max(worst_unresolved, std::abs(delta) / 15.0);
    return left + right + delta / 15.0;
  }
  return recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1,
                 worst_unresolved) +
         recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1,
                 worst_unresolved);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double worst = 0.0;
  const double value =
      recurse(f, a, fa, b, fb, m, fm, whole, tol, max_depth, worst);
  if (worst > 0.0) {
    throw QuadratureError(
        "adaptive_simpson: requested tolerance " + std::to_string(tol) +
            " not reached; achieved ~" + std::to_string(worst),
        worst);
  }
  return sign * value;
}

}  // namespace hok
