#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hok/rng.hpp"

namespace hok {

// Proposal/acceptance counters for rejection samplers.
struct SampleStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

// The four benchmark targets: N(mu, var), Gamma(shape, rate),
// lp-symmetric exp(-|x|^p)/(2 Gamma(1+1/p)), and the Fejer-de la Vallee
// Poussin density (2/pi)(sin(x/2)/x)^2. Characteristic functions use the
// phi(t) = int f(u) e^{2 pi i t u} du convention. Instances are immutable;
// samplers draw from a caller-owned stream.
class TargetDistribution {
 public:
  enum class Name { normal, gamma, lp_symmetric, fvp };

  static TargetDistribution normal(double mu, double var);
  static TargetDistribution gamma(double shape, double rate);
  static TargetDistribution lp_symmetric(double p_exponent);
  static TargetDistribution fvp();

  Name name() const { return name_; }
  const std::string& label() const { return label_; }

  double pdf(double x) const;
  double cdf(double x) const;
  std::complex<double> charfn(double t) const;
  double charfn_mod_sq(double t) const;  // |phi(t)|^2

  // int f^2 dx = int |phi|^2 dt (closed form; lp by quadrature).
  double pdf_l2_sq() const;

  double sample(RngStream& rng, SampleStats* stats = nullptr) const;
  std::vector<double> sample_n(RngStream& rng, std::size_t n,
                               SampleStats* stats = nullptr) const;

  // Parameters (meaningful fields depend on name()).
  double mu = 0.0;
  double var = 1.0;
  double shape = 1.0;
  double rate = 1.0;
  double p_exponent = 2.0;

 private:
  TargetDistribution() = default;
  Name name_ = Name::normal;
  std::string label_;
};

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

}  // namespace hok
