#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hok/mise.hpp"

using namespace hok;

namespace {

constexpr double kPi = 3.14159265358979323846;

// fixed-step composite Simpson, independent of the adaptive integrator
double composite_simpson(const std::function<double(double)>& f, double a,
                         double b, int n_half) {
  const int n = 2 * n_half;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

BenchConfig small_config(std::uint64_t seed) {
  BenchConfig config;
  config.dist = TargetDistribution::normal(0.0, 0.1);
  KernelEntry gaussian;
  gaussian.spec = {KernelFamily::gaussian, 2, std::nullopt, std::nullopt};
  gaussian.rule = {BandwidthKind::nrd, 0.0};
  gaussian.correct = false;
  KernelEntry tsinc;
  tsinc.spec = {KernelFamily::tsinc, 2, std::nullopt, std::nullopt};
  tsinc.rule = {BandwidthKind::order_rate, 0.0};
  tsinc.correct = true;
  config.kernels = {gaussian, tsinc};
  config.ns = {30};
  config.reps = 6;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("ise basics") {
  EstimateGrid g = make_grid(-5.0, 5.0, 1001);
  std::vector<double> truth(g.xs.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = std::exp(-g.xs[i] * g.xs[i]);
  }
  CHECK(ise(truth, truth, g.step()) == 0.0);

  std::vector<double> shifted(truth);
  for (auto& v : shifted) v += 0.01;
  CHECK(ise(shifted, truth, g.step()) == doctest::Approx(1e-3).epsilon(1e-12));

  std::vector<double> ramp(truth);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] += g.xs[i] / 500.0;
  CHECK(std::abs(ise(ramp, truth, g.step()) - 250.0 / 3.0 / 250000.0) < 1e-8);

  CHECK_THROWS_AS(ise({1.0, 2.0}, {1.0}, 0.1), std::invalid_argument);
}

TEST_CASE("mc_mise validates its config") {
  BenchConfig config = small_config(1);
  config.reps = 1;
  CHECK_THROWS_AS(mc_mise(config), std::invalid_argument);
  config = small_config(1);
  config.ns = {};
  CHECK_THROWS_AS(mc_mise(config), std::invalid_argument);
  config = small_config(1);
  config.kernels.clear();
  CHECK_THROWS_AS(mc_mise(config), std::invalid_argument);
  config = small_config(1);
  config.grid.m = 2;
  CHECK_THROWS_AS(mc_mise(config), std::invalid_argument);
}

TEST_CASE("mc_mise is a pure function of its config") {
  const BenchReport a = mc_mise(small_config(99));
  const BenchReport b = mc_mise(small_config(99));
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].mise == b.rows[i].mise);
    CHECK(a.rows[i].se == b.rows[i].se);
  }
  CHECK(a.fingerprint == b.fingerprint);
  const BenchReport c = mc_mise(small_config(100));
  CHECK(a.rows[0].mise != c.rows[0].mise);
}

TEST_CASE("mc_mise magnitudes are sane") {
  BenchConfig config = small_config(7);
  config.reps = 30;
  config.ns = {50};
  const BenchReport r = mc_mise(config);
  for (const auto& row : r.rows) {
    CHECK(row.mise > 1e-4);
    CHECK(row.mise < 0.5);
    CHECK(row.se > 0.0);
    CHECK(row.se < row.mise);
  }
}

TEST_CASE("correction reduces ISE pathwise and on average") {
  BenchConfig corrected;
  corrected.dist = TargetDistribution::normal(0.0, 0.1);
  KernelEntry sinc_entry;
  sinc_entry.spec = {KernelFamily::sinc, 2, std::nullopt, std::nullopt};
  sinc_entry.rule = {BandwidthKind::sinc_log, 0.0};
  sinc_entry.correct = true;
  corrected.kernels = {sinc_entry};
  corrected.ns = {50};
  corrected.reps = 40;
  corrected.seed = 2024;

  BenchConfig raw = corrected;
  raw.kernels[0].correct = false;

  const BenchReport with = mc_mise(corrected);
  const BenchReport without = mc_mise(raw);
  CHECK(with.rows[0].pathwise_violations == 0);
  CHECK(with.rows[0].mise < without.rows[0].mise);
}

TEST_CASE("spectral MISE rejects kernels without a compact trig-poly density") {
  const TargetDistribution d = TargetDistribution::normal(0.0, 0.1);
  CHECK_THROWS_AS(
      mise_spectral(KernelSpec{KernelFamily::gaussian, 2, std::nullopt, std::nullopt},
                    d, 0.5, 100),
      std::invalid_argument);
  CHECK_THROWS_AS(
      mise_spectral(KernelSpec{KernelFamily::sinc, 2, std::nullopt, std::nullopt}, d,
                    0.5, 100),
      std::invalid_argument);
  // tsinc goes through
  const double v = mise_spectral(
      KernelSpec{KernelFamily::tsinc, 2, std::nullopt, std::nullopt}, d, 0.5, 100);
  CHECK(v > 0.0);
}

TEST_CASE("spectral MISE approaches the Plancherel limit for huge h") {
  const CoefficientVector cv = tsinc_coefficients(1, 1.0 / 3.0);
  const TargetDistribution d = TargetDistribution::normal(0.0, 0.1);
  const double limit = 1.0 / (2.0 * std::sqrt(kPi * 0.1));  // int f^2
  const double v = mise_spectral(cv, d, 1e4, 1);
  CHECK(std::abs(v - limit) < 1e-3);
  CHECK(d.pdf_l2_sq() == doctest::Approx(limit).epsilon(1e-15));
}

TEST_CASE("spectral MISE agrees with an independent composite evaluation") {
  const CoefficientVector cv = tsinc_coefficients(1, 1.0 / 3.0);
  const TargetDistribution d = TargetDistribution::normal(0.0, 0.1);
  const int n = 100;
  const double h = std::pow(100.0, -0.2);
  auto g_of = [&](double s) {
    if (std::abs(s) > 0.5) return 0.0;
    double acc = cv.coeffs[0];
    for (int j = 1; j <= cv.q; ++j) {
      acc += 2.0 * cv.coeffs[j] * std::cos(2.0 * kPi * j * s);
    }
    return acc;
  };
  auto phi2 = [&](double t) { return d.charfn_mod_sq(t); };
  const double term1 = g_squared_integral(cv) / (n * h);
  const double term2 = composite_simpson(
      [&](double t) {
        const double g = g_of(h * t) - 1.0;
        return g * g * phi2(t);
      },
      -8.0, 8.0, 400000);
  const double term3 = composite_simpson(
                           [&](double t) {
                             const double g = g_of(h * t);
                             return g * g * phi2(t);
                           },
                           -8.0, 8.0, 400000) /
                       n;
  const double reference = term1 + term2 - term3;
  CHECK(mise_spectral(cv, d, h, n) == doctest::Approx(reference).epsilon(1e-6));
}

TEST_CASE("spectral MISE tracks Monte Carlo") {
  const TargetDistribution d = TargetDistribution::normal(0.0, 0.1);
  const CoefficientVector cv = tsinc_coefficients(1, optimal_alpha(1).alpha_star);
  const int n = 100;
  const double h = std::pow(100.0, -0.2);
  const double spectral = mise_spectral(cv, d, h, n);

  BenchConfig config;
  config.dist = d;
  KernelEntry entry;
  entry.spec = {KernelFamily::tsinc, 2, std::nullopt, std::nullopt};
  entry.rule = {BandwidthKind::fixed, h};
  entry.correct = false;
  config.kernels = {entry};
  config.ns = {n};
  config.reps = 150;
  config.seed = 314159;
  const BenchReport rep = mc_mise(config);
  CHECK(std::abs(spectral - rep.rows[0].mise) < 4.0 * rep.rows[0].se);
}

TEST_CASE("asymptotic constant: closed-form cross-checks") {
  const CoefficientVector cv = tsinc_coefficients(1, optimal_alpha(1).alpha_star);
  CHECK(g_squared_integral(cv) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const double gp0 = g_deriv_2q_at_zero(cv);

  // normal target: int t^4 e^{-a t^2} dt = (3/(4 a^2)) sqrt(pi/a)
  const TargetDistribution normal = TargetDistribution::normal(0.0, 0.1);
  const double a = 4.0 * kPi * kPi * 0.1;
  const double j_normal = 3.0 / (4.0 * a * a) * std::sqrt(kPi / a);
  const double expected_normal = 1.0 / 3.0 + gp0 * gp0 / 4.0 * j_normal;
  CHECK(asymptotic_mise_constant(cv, normal) ==
        doctest::Approx(expected_normal).epsilon(1e-8));

  // fvp target: triangular |phi|^2, int t^4 (1 - 2 pi t)^2 over the support
  const TargetDistribution fvp = TargetDistribution::fvp();
  const double j_fvp = 2.0 / (105.0 * std::pow(2.0 * kPi, 5.0));
  const double expected_fvp = 1.0 / 3.0 + gp0 * gp0 / 4.0 * j_fvp;
  CHECK(asymptotic_mise_constant(cv, fvp) ==
        doctest::Approx(expected_fvp).epsilon(1e-8));

  // gamma(2,2): t^4 |phi|^2 -> const, integral diverges and is rejected
  const TargetDistribution gamma = TargetDistribution::gamma(2.0, 2.0);
  CHECK_THROWS_AS(asymptotic_mise_constant(cv, gamma), std::invalid_argument);
}

TEST_CASE("bench csv layout") {
  BenchConfig config = small_config(5);
  const BenchReport r = mc_mise(config);
  std::ostringstream os;
  write_bench_csv(r, os);
  const std::string text = os.str();
  CHECK(text.rfind("distribution,kernel,n,mise,se,reps,seed\n", 0) == 0);
  CHECK(text.find("gaussian") != std::string::npos);
  CHECK(text.find("tsinc-p2") != std::string::npos);

  std::ostringstream table;
  print_bench_table(r, table);
  CHECK(table.str().find("*") != std::string::npos);
}
