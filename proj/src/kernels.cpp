#include "hok/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hok/quadrature.hpp"

namespace hok {
namespace {

constexpr double kPi = 3.14159265358979323846;

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void check_q(int q) {
  if (q < 1) throw std::invalid_argument("kernel order: q must be >= 1");
}

void check_alpha(double alpha) {
  if (alpha == 1.0) {
    throw std::invalid_argument(
        "alpha = 1 degenerates the kernel: the top-order moment condition "
        "cannot be satisfied");
  }
}

}  // namespace

double sinc(double x) {
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

CoefficientVector tsinc_coefficients(int q, double alpha) {
  check_q(q);
  check_alpha(alpha);
  CoefficientVector cv;
  cv.q = q;
  cv.alpha = alpha;
  cv.coeffs.assign(q + 1, 0.0);
  cv.coeffs[0] = alpha;
  const double qf = factorial(q);
  for (int j = 1; j <= q; ++j) {
    double prod = 1.0;
    for (int l = 1; l <= q; ++l) {
      if (l != j) prod *= static_cast<double>(l) * l - static_cast<double>(j) * j;
    }
    const double ratio = qf / j;
    cv.coeffs[j] = 0.5 * (1.0 - alpha) * ratio * ratio / prod;
  }
  return cv;
}

CoefficientVector tsinc_coefficients_bruteforce(int q, double alpha) {
  check_q(q);
  check_alpha(alpha);
  if (q > 16) {
    throw std::invalid_argument(
        "tsinc_coefficients_bruteforce: elimination path supports q <= 16");
  }
  const int n = q;
  // Moment system: row r holds (j^2)^r, j = 1..q; rhs = [(1-alpha)/2, 0, ...].
  std::vector<long double> a(static_cast<std::size_t>(n) * n);
  std::vector<long double> b(n, 0.0L);
  b[0] = 0.5L * (1.0L - static_cast<long double>(alpha));
  for (int r = 0; r < n; ++r) {
    for (int j = 1; j <= n; ++j) {
      long double e = 1.0L;
      const long double jj = static_cast<long double>(j) * j;
      for (int t = 0; t < r; ++t) e *= jj;
      a[static_cast<std::size_t>(r) * n + (j - 1)] = e;
    }
  }

  // Row-equilibrated LU with partial pivoting.
  std::vector<long double> lu(a);
  std::vector<long double> scale(n, 1.0L);
  std::vector<int> piv(n);
  for (int r = 0; r < n; ++r) {
    long double s = 0.0L;
    for (int j = 0; j < n; ++j) s = std::max(s, std::abs(lu[static_cast<std::size_t>(r) * n + j]));
    scale[r] = s > 0.0L ? s : 1.0L;
    for (int j = 0; j < n; ++j) lu[static_cast<std::size_t>(r) * n + j] /= scale[r];
  }
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(lu[static_cast<std::size_t>(r) * n + c]) >
          std::abs(lu[static_cast<std::size_t>(p) * n + c])) {
        p = r;
      }
    }
    piv[c] = p;
    if (p != c) {
      for (int j = 0; j < n; ++j) {
        std::swap(lu[static_cast<std::size_t>(c) * n + j],
                  lu[static_cast<std::size_t>(p) * n + j]);
      }
      std::swap(scale[c], scale[p]);
    }
    const long double d = lu[static_cast<std::size_t>(c) * n + c];
    if (d == 0.0L) {
      throw std::runtime_error("tsinc_coefficients_bruteforce: singular system");
    }
    for (int r = c + 1; r < n; ++r) {
      const long double f = lu[static_cast<std::size_t>(r) * n + c] / d;
      lu[static_cast<std::size_t>(r) * n + c] = f;
      for (int j = c + 1; j < n; ++j) {
        lu[static_cast<std::size_t>(r) * n + j] -= f * lu[static_cast<std::size_t>(c) * n + j];
      }
    }
  }

  auto solve = [&](const std::vector<long double>& rhs) {
    std::vector<long double> y(n);
    for (int r = 0; r < n; ++r) y[r] = rhs[r];
    for (int c = 0; c < n; ++c) {
      if (piv[c] != c) std::swap(y[c], y[piv[c]]);
    }
    // scale[] was permuted with the rows, so it lines up with the pivoted rhs
    for (int r = 0; r < n; ++r) y[r] /= scale[r];
    for (int c = 0; c < n; ++c) {
      for (int r = c + 1; r < n; ++r) y[r] -= lu[static_cast<std::size_t>(r) * n + c] * y[c];
    }
    for (int c = n - 1; c >= 0; --c) {
      for (int j = c + 1; j < n; ++j) y[c] -= lu[static_cast<std::size_t>(c) * n + j] * y[j];
      y[c] /= lu[static_cast<std::size_t>(c) * n + c];
    }
    return y;
  };

  std::vector<long double> x = solve(b);
  for (int it = 0; it < 3; ++it) {
    std::vector<long double> res(n, 0.0L);
    for (int r = 0; r < n; ++r) {
      long double acc = b[r];
      for (int j = 0; j < n; ++j) acc -= a[static_cast<std::size_t>(r) * n + j] * x[j];
      res[r] = acc;
    }
    std::vector<long double> delta = solve(res);
    for (int j = 0; j < n; ++j) x[j] += delta[j];
  }

  long double res_inf = 0.0L;
  long double b_inf = 0.0L;
  for (int r = 0; r < n; ++r) {
    long double acc = b[r];
    for (int j = 0; j < n; ++j) acc -= a[static_cast<std::size_t>(r) * n + j] * x[j];
    res_inf = std::max(res_inf, std::abs(acc));
    b_inf = std::max(b_inf, std::abs(b[r]));
  }
  if (res_inf > 1e-6L * b_inf) {
    throw std::runtime_error(
        "tsinc_coefficients_bruteforce: residual exceeds 1e-6 * ||b||");
  }

  CoefficientVector cv;
  cv.q = q;
  cv.alpha = alpha;
  cv.coeffs.assign(q + 1, 0.0);
  cv.coeffs[0] = alpha;
  for (int j = 1; j <= q; ++j) cv.coeffs[j] = static_cast<double>(x[j - 1]);
  return cv;
}

ConstraintErrors coefficient_constraint_errors(const CoefficientVector& cv) {
  const int q = cv.q;
  ConstraintErrors e;
  double sum = cv.coeffs[0];
  for (int j = 1; j <= q; ++j) sum += 2.0 * cv.coeffs[j];
  e.sum_err = std::abs(sum - 1.0);
  for (int r = 1; r < q; ++r) {
    double m = 0.0;
    double scale = 0.0;
    for (int j = 1; j <= q; ++j) {
      const double term = std::pow(static_cast<double>(j), 2.0 * r) * cv.coeffs[j];
      m += 2.0 * term;
      scale = std::max(scale, std::abs(term));
    }
    if (scale > 0.0) e.moment_err = std::max(e.moment_err, std::abs(m) / scale);
  }
  double top = 0.0;
  for (int j = 1; j <= q; ++j) {
    top += 2.0 * std::pow(static_cast<double>(j), 2.0 * q) * cv.coeffs[j];
  }
  const double qf = factorial(q);
  const double expected = (1.0 - cv.alpha) * qf * qf * ((q % 2 == 0) ? -1.0 : 1.0);
  e.top_rel_err = std::abs(top - expected) / std::abs(expected);
  return e;
}

double top_moment_identity_sum(int q) {
  check_q(q);
  double sum = 0.0;
  for (int k = 1; k <= q; ++k) {
    double prod = 1.0;
    for (int j = 1; j <= q; ++j) {
      if (j != k) {
        prod *= (static_cast<double>(j) * j) / (static_cast<double>(k) * k) - 1.0;
      }
    }
    sum += 1.0 / prod;
  }
  return sum;
}

AlphaChoice optimal_alpha(int q) {
  check_q(q);
  const double qf = factorial(q);
  double c = 0.0;
  for (int l = 1; l <= q; ++l) {
    double prod = 1.0;
    for (int j = 1; j <= q; ++j) {
      if (j != l) prod *= static_cast<double>(j) * j - static_cast<double>(l) * l;
    }
    const double term = (qf / l) * (qf / l) / prod;
    c += term * term;
  }
  c *= 0.5;
  return {c / (1.0 + c), c};
}

double g_squared_integral(const CoefficientVector& cv) {
  double acc = cv.coeffs[0] * cv.coeffs[0];
  for (int j = 1; j <= cv.q; ++j) acc += 2.0 * cv.coeffs[j] * cv.coeffs[j];
  return acc;
}

double eval_tsinc(const CoefficientVector& cv, double u) {
  // j and -j terms are paired so evaluation is even in u to rounding.
  double acc = cv.coeffs[0] * sinc(kPi * u);
  for (int j = 1; j <= cv.q; ++j) {
    acc += cv.coeffs[j] * (sinc(kPi * (u - j)) + sinc(kPi * (u + j)));
  }
  return acc;
}

double g_deriv_2q_at_zero(const CoefficientVector& cv) {
  const int q = cv.q;
  double top = 0.0;
  for (int j = 1; j <= q; ++j) {
    top += 2.0 * std::pow(static_cast<double>(j), 2.0 * q) * cv.coeffs[j];
  }
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(2.0 * kPi, 2.0 * q) * top;
}

namespace {

// Power series of the g1 kernel in w = v^2 (v = 2 pi u):
//   K = sum_m a_m w^m,  a_0 = prod_{i<=q} 2i/(2i+1),
//   a_{m+1} = -a_m (m + 1/2) / (4 (m + q + 3/2) (2m + 2) (2m + 1)).
// 28 terms hold the truncation below 1e-19 at the switch radius |v| = 8.
constexpr int kG1SeriesTerms = 28;

struct G1Series {
  std::array<double, kG1SeriesTerms> coef{};
};

const G1Series& g1_series(int q) {
  static const std::array<G1Series, 4> tables = [] {
    std::array<G1Series, 4> t{};
    for (int qq = 1; qq <= 4; ++qq) {
      double a = 1.0;
      for (int i = 1; i <= qq; ++i) a *= (2.0 * i) / (2.0 * i + 1.0);
      for (int m = 0; m < kG1SeriesTerms; ++m) {
        t[qq - 1].coef[m] = a;
        a *= -(m + 0.5) /
             (4.0 * (m + qq + 1.5) * (2.0 * m + 2.0) * (2.0 * m + 1.0));
      }
    }
    return t;
  }();
  return tables[q - 1];
}

void check_g1_q(int q) {
  if (q < 1 || q > 4) {
    throw std::invalid_argument(
        "eval_g1: closed forms are tabulated for orders 2..8 (q = 1..4); use "
        "the quadrature family beyond that");
  }
}

}  // namespace

double g1_value_at_zero(int q) {
  check_g1_q(q);
  return g1_series(q).coef[0];
}

double eval_g1(int q, double u) {
  check_g1_q(q);
  const double v = 2.0 * kPi * u;
  if (std::abs(v) < 8.0) {
    const double w = v * v;
    const auto& tb = g1_series(q).coef;
    double acc = 0.0;
    for (int m = kG1SeriesTerms - 1; m >= 0; --m) acc = acc * w + tb[m];
    return acc;
  }
  const double s = std::sin(0.5 * v);
  const double c = std::cos(0.5 * v);
  const double v2 = v * v;
  const double v3 = v2 * v;
  switch (q) {
    case 1:
      return (16.0 * s - 8.0 * v * c) / v3;
    case 2: {
      const double v5 = v3 * v2;
      return (768.0 * s - 384.0 * v * c - 64.0 * v2 * s) / v5;
    }
    case 3: {
      const double v7 = v3 * v3 * v;
      return (92160.0 * s - 46080.0 * v * c + 768.0 * v3 * c - 9216.0 * v2 * s) /
             v7;
    }
    default: {
      const double v4 = v2 * v2;
      const double v9 = v4 * v4 * v;
      return (20643840.0 * s - 10321920.0 * v * c + 245760.0 * v3 * c -
              2211840.0 * v2 * s + 12288.0 * v4 * s) /
             v9;
    }
  }
}

SpectralDensity g1_spectral(int q) {
  check_q(q);
  SpectralDensity g;
  g.form = SpectralDensity::Form::polynomial;
  g.q = q;
  g.eval = [q](double t) {
    if (std::abs(t) > 0.5) return 0.0;
    double b = 1.0 - 4.0 * t * t;
    double r = 1.0;
    for (int i = 0; i < q; ++i) r *= b;
    return r;
  };
  return g;
}

SpectralDensity g2_spectral(int q) {
  check_q(q);
  SpectralDensity g;
  g.form = SpectralDensity::Form::polynomial;
  g.q = q;
  g.eval = [q](double t) {
    if (std::abs(t) > 0.5) return 0.0;
    double b = 2.0 * t;
    double r = 1.0;
    for (int i = 0; i < 2 * q; ++i) r *= b;
    return 1.0 - r;
  };
  return g;
}

SpectralDensity tsinc_spectral(const CoefficientVector& cv) {
  SpectralDensity g;
  g.form = SpectralDensity::Form::trig_polynomial;
  g.q = cv.q;
  g.eval = [cv](double t) {
    if (std::abs(t) > 0.5) return 0.0;
    double acc = cv.coeffs[0];
    for (int j = 1; j <= cv.q; ++j) {
      acc += 2.0 * cv.coeffs[j] * std::cos(2.0 * kPi * j * t);
    }
    return acc;
  };
  return g;
}

double eval_quadrature_kernel(const SpectralDensity& g, double u) {
  return 2.0 * adaptive_simpson(
                   [&](double t) { return g.eval(t) * std::cos(2.0 * kPi * u * t); },
                   0.0, 0.5, 1e-10, 40);
}

namespace {

class GaussianKernel final : public Kernel {
 public:
  double operator()(double u) const override {
    return kInvSqrt2Pi * std::exp(-0.5 * u * u);
  }
  int order() const override { return 2; }
  const std::string& name() const override { return name_; }

 private:
  static constexpr double kInvSqrt2Pi = 0.3989422804014326779;
  std::string name_ = "gaussian";
};

class SincKernel final : public Kernel {
 public:
  double operator()(double u) const override { return sinc(u) / kPi; }
  int order() const override { return 0; }
  const std::string& name() const override { return name_; }

 private:
  std::string name_ = "sinc";
};

class TsincKernel final : public Kernel {
 public:
  TsincKernel(CoefficientVector cv, std::string name)
      : cv_(std::move(cv)), name_(std::move(name)) {}
  double operator()(double u) const override { return eval_tsinc(cv_, u); }
  int order() const override { return 2 * cv_.q; }
  const std::string& name() const override { return name_; }
  const CoefficientVector& coefficients() const { return cv_; }

 private:
  CoefficientVector cv_;
  std::string name_;
};

class G1Kernel final : public Kernel {
 public:
  G1Kernel(int q, std::string name) : q_(q), name_(std::move(name)) {}
  double operator()(double u) const override { return eval_g1(q_, u); }
  int order() const override { return 2 * q_; }
  const std::string& name() const override { return name_; }

 private:
  int q_;
  std::string name_;
};

class QuadratureKernel final : public Kernel {
 public:
  QuadratureKernel(SpectralDensity g, std::string name)
      : g_(std::move(g)), name_(std::move(name)) {}
  double operator()(double u) const override {
    return eval_quadrature_kernel(g_, u);
  }
  int order() const override { return 2 * g_.q; }
  const std::string& name() const override { return name_; }

 private:
  SpectralDensity g_;
  std::string name_;
};

int order_to_q(int order) {
  if (order < 2 || order % 2 != 0) {
    throw std::invalid_argument("kernel order must be even and >= 2");
  }
  return order / 2;
}

}  // namespace

const char* family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::sinc: return "sinc";
    case KernelFamily::g1: return "g1";
    case KernelFamily::tsinc: return "tsinc";
    case KernelFamily::quadrature_g: return "g2";
  }
  return "?";
}

std::optional<KernelFamily> parse_family(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "sinc") return KernelFamily::sinc;
  if (name == "g1") return KernelFamily::g1;
  if (name == "tsinc") return KernelFamily::tsinc;
  if (name == "g2" || name == "quadrature" || name == "quadrature-g") {
    return KernelFamily::quadrature_g;
  }
  return std::nullopt;
}

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::gaussian:
      return std::make_unique<GaussianKernel>();
    case KernelFamily::sinc:
      return std::make_unique<SincKernel>();
    case KernelFamily::g1: {
      const int q = order_to_q(spec.order);
      check_g1_q(q);
      return std::make_unique<G1Kernel>(q, "g1-p" + std::to_string(2 * q));
    }
    case KernelFamily::tsinc: {
      const int q = order_to_q(spec.order);
      const double alpha =
          spec.alpha.has_value() ? *spec.alpha : optimal_alpha(q).alpha_star;
      return std::make_unique<TsincKernel>(tsinc_coefficients(q, alpha),
                                           "tsinc-p" + std::to_string(2 * q));
    }
    case KernelFamily::quadrature_g: {
      const int q = order_to_q(spec.order);
      SpectralDensity g = spec.g_expr.has_value() ? *spec.g_expr : g2_spectral(q);
      return std::make_unique<QuadratureKernel>(std::move(g),
                                                "g2-p" + std::to_string(2 * q));
    }
  }
  throw std::invalid_argument("make_kernel: unknown family");
}

}  // namespace hok
