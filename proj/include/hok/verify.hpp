#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hok::verify {

struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  double observed = 0.0;
  bool pass = false;
  std::string note;
};

struct Options {
  // Test hook: added to K(1) before the constraint and moment checks so a
  // broken coefficient is visibly caught.
  double coeff_perturbation = 0.0;
  // Replications for the spectral-vs-Monte-Carlo comparison.
  int mc_reps = 300;
  std::uint64_t seed = 20240401;
};

// Truncated quadrature moment int u^j K du of the g1 kernel of order 2q.
// Odd moments integrate the odd integrand over [-U, U]; even moments combine
// partial integrals at U0, U0+1, ..., U0+k (half-period shifts of the
// oscillatory tail) with binomial weights so the truncation error falls
// below tolerance.
double g1_moment_quadrature(int q, int j, double u0 = 300.0, int averages = 6);

std::vector<CheckResult> run_all(const Options& options);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace hok::verify
