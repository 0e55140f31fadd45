#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hok {

// sin(x)/x with a series guard near 0 (|x| < 1e-6 -> 1 - x^2/6 + x^4/120).
double sinc(double x);

// Symmetric coefficient sequence {K(j), |j| <= q} of a truncated-sinc kernel
// of order 2q. coeffs[j] holds K(j) = K(-j); coeffs[0] = alpha. The
// coefficients solve the moment constraints
//   sum_j K(j) = 1,  sum_j j^{2r} K(j) = 0 for r = 1..q-1,
// and satisfy sum_j j^{2q} K(j) = (1-alpha) (q!)^2 (-1)^{q+1}.
struct CoefficientVector {
  int q = 0;
  double alpha = 0.0;
  std::vector<double> coeffs;  // size q + 1
};

// Closed-form solution of the moment-constraint system:
//   K(0) = alpha,
//   K(j) = (1-alpha)/2 * (q!/j)^2 / prod_{l != j} (l^2 - j^2),  j = 1..q.
CoefficientVector tsinc_coefficients(int q, double alpha);

// Same system solved by generic row-equilibrated partial-pivot elimination
// (long double, with iterative refinement). No closed form is used; this is
// the independent oracle for tsinc_coefficients. Valid for q <= 16; the
// residual is checked against 1e-6 * ||b||_inf.
CoefficientVector tsinc_coefficients_bruteforce(int q, double alpha);

// Residuals of the defining constraints, for verification:
//   sum_err       |K(0) + 2 sum K(j) - 1|
//   moment_err    max_r |sum_j j^{2r} K(j)| / max_j |j^{2r} K(j)|, r < q
//   top_rel_err   relative error of sum_j j^{2q} K(j) vs (1-a)(q!)^2(-1)^{q+1}
struct ConstraintErrors {
  double sum_err = 0.0;
  double moment_err = 0.0;
  double top_rel_err = 0.0;
};
ConstraintErrors coefficient_constraint_errors(const CoefficientVector& cv);

// sum_{k=1..q} 1 / prod_{j != k} (j^2/k^2 - 1); equals (-1)^{q+1}. This is
// the identity that pins the top-order moment above.
double top_moment_identity_sum(int q);

// C = 1/2 sum_{l=1..q} ((q!)^2 / (l^2 prod_{j != l}(j^2 - l^2)))^2 and the
// minimizer alpha* = C/(1+C) of the kernel L2 term
// int G^2 = alpha^2 + (1-alpha)^2 C. At alpha*, int G^2 = C/(1+C).
struct AlphaChoice {
  double alpha_star = 0.0;
  double c = 0.0;
};
AlphaChoice optimal_alpha(int q);

// int G^2 dt = K(0)^2 + 2 sum_{j>=1} K(j)^2 (Plancherel).
double g_squared_integral(const CoefficientVector& cv);

// Truncated-sinc kernel K(u) = sum_{|j| <= q} K(j) sinc(pi (u - j)).
double eval_tsinc(const CoefficientVector& cv, double u);

// G^{(2q)}(0) = (-1)^q (2 pi)^{2q} sum_j j^{2q} K(j) for the trig-polynomial
// spectral density G(t) = alpha + 2 sum K(j) cos(2 pi j t).
double g_deriv_2q_at_zero(const CoefficientVector& cv);

// Closed-form covariance kernels with spectral density (1 - 4t^2)^q on
// [-1/2, 1/2], tabulated for q = 1..4 (orders 2..8). Evaluated at v = 2 pi u
// so that int K du = 1; a power series takes over for |v| < 8 where the
// closed form cancels catastrophically.
double eval_g1(int q, double u);

// K(0) of the g1 family: 2/3, 8/15, 16/35, 128/315 for q = 1..4.
double g1_value_at_zero(int q);

// An even spectral density on [-1/2, 1/2] with G(0) = 1; eval is zero
// outside the support. q records the order of the first nonvanishing even
// derivative at 0 (which is 2q).
struct SpectralDensity {
  enum class Form { polynomial, trig_polynomial };
  Form form = Form::polynomial;
  int q = 1;
  std::function<double(double)> eval;
};

SpectralDensity g1_spectral(int q);                          // (1 - 4 t^2)^q
SpectralDensity g2_spectral(int q);                          // 1 - (2t)^{2q}
SpectralDensity tsinc_spectral(const CoefficientVector& cv);  // trig poly

// Fourier-cosine transform 2 int_0^{1/2} G(t) cos(2 pi u t) dt by adaptive
// quadrature (absolute tolerance 1e-10). Oracle for the closed forms and the
// only evaluator for densities without one (g2).
double eval_quadrature_kernel(const SpectralDensity& g, double u);

enum class KernelFamily { gaussian, sinc, g1, tsinc, quadrature_g };

const char* family_name(KernelFamily family);
std::optional<KernelFamily> parse_family(const std::string& name);

// order is the kernel order p = 2q (ignored for gaussian/sinc); alpha
// defaults to optimal_alpha(q) for tsinc; g_expr supplies the spectral
// density for the quadrature family (defaults to g2 of the given order).
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  int order = 2;
  std::optional<double> alpha;
  std::optional<SpectralDensity> g_expr;
};

class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual double operator()(double u) const = 0;
  virtual int order() const = 0;  // p; 0 means unbounded (sinc)
  virtual const std::string& name() const = 0;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec);

}  // namespace hok
