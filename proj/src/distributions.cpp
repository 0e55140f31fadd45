#include "hok/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hok/quadrature.hpp"

namespace hok {
namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc_local(double x) {
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// ---- incomplete gamma -------------------------------------------------

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// ---- fvp helpers ------------------------------------------------------

double fvp_pdf(double x) {
  const double s = sinc_local(0.5 * x);
  return s * s / (2.0 * kPi);
}

// int_x^inf cos(u)/u^2 du by repeated integration by parts; remainder is
// bounded by 720/x^7, so x >= 32 keeps it below ~2e-8.
double cos_over_sq_tail(double x) {
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double x4 = x2 * x2;
  const double x5 = x4 * x;
  const double x6 = x4 * x2;
  const double x7 = x6 * x;
  return -s / x2 + 2.0 * c / x3 + 6.0 * s / x4 - 24.0 * c / x5 -
         120.0 * s / x6 + 720.0 * c / x7;
}

constexpr double kFvpTailStart = 32.0;

// P(X > x) for x >= kFvpTailStart: (1/pi)(1/x - int_x^inf cos u / u^2 du).
double fvp_upper_tail_series(double x) {
  return (1.0 / kPi) * (1.0 / x - cos_over_sq_tail(x));
}

struct FvpCdfTable {
  double h = 1.0 / 64.0;
  std::vector<double> upper;  // upper[i] = P(X > i*h)

  FvpCdfTable() {
    const int n = static_cast<int>(std::lround(kFvpTailStart / h));
    upper.resize(n + 1);
    upper[n] = fvp_upper_tail_series(kFvpTailStart);
    for (int i = n - 1; i >= 0; --i) {
      upper[i] = upper[i + 1] +
                 adaptive_simpson(fvp_pdf, i * h, (i + 1) * h, 1e-13, 30);
    }
  }
};

double fvp_upper_tail(double x) {
  static const FvpCdfTable table;
  if (x >= kFvpTailStart) return fvp_upper_tail_series(x);
  if (x <= 0.0) throw std::invalid_argument("fvp tail: x must be positive");
  const int i = static_cast<int>(x / table.h);
  const double xi = i * table.h;
  return table.upper[i] - adaptive_simpson(fvp_pdf, xi, x, 1e-13, 30);
}

// ---- samplers ---------------------------------------------------------

double sample_std_normal(RngStream& rng) {
  while (true) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

// Marsaglia-Tsang for shape >= 1 (rate 1).
double sample_gamma_mt(RngStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    const double x = sample_std_normal(rng);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_gamma(RngStream& rng, double shape, double rate) {
  double g;
  const double rounded = std::round(shape);
  if (shape >= 1.0 && shape == rounded && shape <= 32.0) {
    // integer shape: sum of unit exponentials
    g = 0.0;
    for (int i = 0; i < static_cast<int>(rounded); ++i) {
      g -= std::log(rng.uniform_pos());
    }
  } else if (shape >= 1.0) {
    g = sample_gamma_mt(rng, shape);
  } else {
    g = sample_gamma_mt(rng, shape + 1.0) *
        std::pow(rng.uniform_pos(), 1.0 / shape);
  }
  return g / rate;
}

// Rejection for the fvp density with envelope (2/pi) min(1/4, 1/x^2):
// uniform body on [-2, 2] plus Pareto tails, acceptance probability pi/4.
double sample_fvp(RngStream& rng, SampleStats* stats) {
  for (int trial = 0; trial < 1000; ++trial) {
    if (stats != nullptr) ++stats->proposals;
    double x;
    if (rng.uniform() < 0.5) {
      x = -2.0 + 4.0 * rng.uniform();
    } else {
      x = 2.0 / rng.uniform_pos();
      if (rng.uniform() < 0.5) x = -x;
    }
    double ratio;
    if (std::abs(x) <= 2.0) {
      const double s = sinc_local(0.5 * x);
      ratio = s * s;
    } else {
      const double s = std::sin(0.5 * x);
      ratio = s * s;
    }
    if (rng.uniform() <= ratio) {
      if (stats != nullptr) ++stats->accepted;
      return x;
    }
  }
  throw std::runtime_error(
      "fvp sampler: 1000 proposals rejected; envelope is broken");
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

TargetDistribution TargetDistribution::normal(double mu, double var) {
  if (!(var > 0.0)) throw std::invalid_argument("normal: var must be positive");
  TargetDistribution d;
  d.name_ = Name::normal;
  d.mu = mu;
  d.var = var;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "normal(mu=%g;var=%g)", mu, var);
  d.label_ = buf;
  return d;
}

TargetDistribution TargetDistribution::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma: shape and rate must be positive");
  }
  TargetDistribution d;
  d.name_ = Name::gamma;
  d.shape = shape;
  d.rate = rate;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "gamma(shape=%g;rate=%g)", shape, rate);
  d.label_ = buf;
  return d;
}

TargetDistribution TargetDistribution::lp_symmetric(double p_exponent) {
  if (!(p_exponent > 0.0)) throw std::invalid_argument("lp: p must be positive");
  TargetDistribution d;
  d.name_ = Name::lp_symmetric;
  d.p_exponent = p_exponent;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "lp(p=%g)", p_exponent);
  d.label_ = buf;
  return d;
}

TargetDistribution TargetDistribution::fvp() {
  TargetDistribution d;
  d.name_ = Name::fvp;
  d.label_ = "fvp";
  return d;
}

double TargetDistribution::pdf(double x) const {
  switch (name_) {
    case Name::normal: {
      const double z = x - mu;
      return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * kPi * var);
    }
    case Name::gamma: {
      if (x <= 0.0) return 0.0;
      return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) -
                      rate * x - std::lgamma(shape));
    }
    case Name::lp_symmetric: {
      const double c = 0.5 / std::tgamma(1.0 + 1.0 / p_exponent);
      return c * std::exp(-std::pow(std::abs(x), p_exponent));
    }
    case Name::fvp:
      return fvp_pdf(x);
  }
  return 0.0;
}

double TargetDistribution::cdf(double x) const {
  switch (name_) {
    case Name::normal:
      return 0.5 * (1.0 + std::erf((x - mu) / std::sqrt(2.0 * var)));
    case Name::gamma:
      return x <= 0.0 ? 0.0 : gamma_p(shape, rate * x);
    case Name::lp_symmetric: {
      const double ax = std::abs(x);
      const double cut = std::pow(45.0, 1.0 / p_exponent) + 1.0;
      const double c = 0.5 / std::tgamma(1.0 + 1.0 / p_exponent);
      const double p = p_exponent;
      const double half = c * adaptive_simpson(
                                  [p](double u) {
                                    return std::exp(-std::pow(u, p));
                                  },
                                  0.0, std::min(ax, cut), 1e-12, 40);
      return x >= 0.0 ? 0.5 + half : 0.5 - half;
    }
    case Name::fvp: {
      if (x == 0.0) return 0.5;
      const double tail = fvp_upper_tail(std::abs(x));
      return x > 0.0 ? 1.0 - tail : tail;
    }
  }
  return 0.0;
}

std::complex<double> TargetDistribution::charfn(double t) const {
  switch (name_) {
    case Name::normal:
      return std::exp(std::complex<double>(-2.0 * kPi * kPi * var * t * t,
                                           2.0 * kPi * mu * t));
    case Name::gamma:
      return std::pow(std::complex<double>(1.0, -2.0 * kPi * t / rate), -shape);
    case Name::lp_symmetric: {
      // even density: phi is real, 2 int_0^inf f(u) cos(2 pi t u) du
      const double cut = std::pow(45.0, 1.0 / p_exponent) + 1.0;
      const double c = 0.5 / std::tgamma(1.0 + 1.0 / p_exponent);
      const double p = p_exponent;
      const double re =
          2.0 * c *
          adaptive_simpson(
              [p, t](double u) {
                return std::cos(2.0 * kPi * t * u) * std::exp(-std::pow(u, p));
              },
              0.0, cut, 1e-11, 40);
      return {re, 0.0};
    }
    case Name::fvp:
      return {std::max(0.0, 1.0 - 2.0 * kPi * std::abs(t)), 0.0};
  }
  return {0.0, 0.0};
}

double TargetDistribution::charfn_mod_sq(double t) const {
  switch (name_) {
    case Name::normal: {
      const double e = std::exp(-2.0 * kPi * kPi * var * t * t);
      return e * e;
    }
    case Name::gamma: {
      const double s = 2.0 * kPi * t / rate;
      return std::pow(1.0 + s * s, -shape);
    }
    case Name::fvp: {
      const double v = std::max(0.0, 1.0 - 2.0 * kPi * std::abs(t));
      return v * v;
    }
    case Name::lp_symmetric: {
      const double v = charfn(t).real();
      return v * v;
    }
  }
  return 0.0;
}

double TargetDistribution::pdf_l2_sq() const {
  switch (name_) {
    case Name::normal:
      return 1.0 / (2.0 * std::sqrt(kPi * var));
    case Name::gamma:
      if (shape <= 0.5) {
        throw std::invalid_argument("pdf_l2_sq: diverges for shape <= 1/2");
      }
      return rate * std::exp(std::lgamma(2.0 * shape - 1.0) -
                             2.0 * std::lgamma(shape) -
                             (2.0 * shape - 1.0) * std::log(2.0));
    case Name::lp_symmetric: {
      const double g = std::tgamma(1.0 + 1.0 / p_exponent);
      return std::pow(2.0, -1.0 / p_exponent) / (2.0 * g);
    }
    case Name::fvp:
      return 1.0 / (3.0 * kPi);
  }
  return 0.0;
}

double TargetDistribution::sample(RngStream& rng, SampleStats* stats) const {
  switch (name_) {
    case Name::normal:
      return mu + std::sqrt(var) * sample_std_normal(rng);
    case Name::gamma:
      return sample_gamma(rng, shape, rate);
    case Name::lp_symmetric: {
      const double g = sample_gamma(rng, 1.0 / p_exponent, 1.0);
      const double mag = std::pow(g, 1.0 / p_exponent);
      return rng.uniform() < 0.5 ? -mag : mag;
    }
    case Name::fvp:
      return sample_fvp(rng, stats);
  }
  return 0.0;
}

std::vector<double> TargetDistribution::sample_n(RngStream& rng, std::size_t n,
                                                 SampleStats* stats) const {
  if (n == 0) throw std::invalid_argument("sample_n: n must be positive");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = sample(rng, stats);
  return out;
}

}  // namespace hok
