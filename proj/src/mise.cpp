#include "hok/mise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hok/quadrature.hpp"
#include "hok/rng.hpp"

namespace hok {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Adaptive integration of f over [0, b] in chunks of width <= 1/16; keeps
// the bisection from missing features narrower than its first subdivision
// (e.g. a characteristic function supported on |t| <= 1/(2 pi)).
double integrate_chunked(const std::function<double(double)>& f, double b,
                         double tol) {
  if (b <= 0.0) return 0.0;
  const int chunks = std::max(1, static_cast<int>(std::ceil(16.0 * b)));
  const double w = b / chunks;
  const double per_tol = tol / chunks;
  double acc = 0.0;
  for (int i = 0; i < chunks; ++i) {
    acc += adaptive_simpson(f, i * w, (i + 1) * w, per_tol, 40);
  }
  return acc;
}

}  // namespace

double ise(const std::vector<double>& est, const std::vector<double>& truth,
           double step) {
  if (est.size() != truth.size()) {
    throw std::invalid_argument("ise: length mismatch");
  }
  if (est.size() < 2) throw std::invalid_argument("ise: need at least 2 points");
  auto sq = [&](std::size_t i) {
    const double d = est[i] - truth[i];
    return d * d;
  };
  double acc = 0.5 * (sq(0) + sq(est.size() - 1));
  for (std::size_t i = 1; i + 1 < est.size(); ++i) acc += sq(i);
  return acc * step;
}

BenchReport mc_mise(const BenchConfig& config) {
  if (config.reps < 2) throw std::invalid_argument("mc_mise: reps must be >= 2");
  if (config.ns.empty()) throw std::invalid_argument("mc_mise: ns is empty");
  if (config.grid.m < 3) throw std::invalid_argument("mc_mise: grid too small");
  if (config.kernels.empty()) {
    throw std::invalid_argument("mc_mise: no kernels configured");
  }
  for (const int n : config.ns) {
    if (n < 1) throw std::invalid_argument("mc_mise: sample sizes must be >= 1");
  }

  const EstimateGrid proto = make_grid(config.grid.lo, config.grid.hi, config.grid.m);
  std::vector<double> truth(proto.xs.size());
  for (std::size_t i = 0; i < proto.xs.size(); ++i) {
    truth[i] = config.dist.pdf(proto.xs[i]);
  }

  std::vector<std::unique_ptr<Kernel>> kernels;
  kernels.reserve(config.kernels.size());
  for (const auto& entry : config.kernels) kernels.push_back(make_kernel(entry.spec));

  const int nk = static_cast<int>(kernels.size());
  BenchReport report;

  std::string first_error;

  for (std::size_t ni = 0; ni < config.ns.size(); ++ni) {
    const int n = config.ns[ni];
    std::vector<std::vector<double>> vals(nk, std::vector<double>(config.reps, 0.0));
    std::vector<std::vector<std::uint8_t>> viol(
        nk, std::vector<std::uint8_t>(config.reps, 0));

#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < config.reps; ++r) {
      try {
        RngStream rng(derive_seed(config.seed, ni, static_cast<std::uint64_t>(r)));
        const std::vector<double> sample =
            config.dist.sample_n(rng, static_cast<std::size_t>(n));
        EstimateGrid grid = proto;
        for (int k = 0; k < nk; ++k) {
          const double h = bandwidth(config.kernels[k].rule, sample, *kernels[k]);
          kde_evaluate(sample, *kernels[k], h, grid);
          const double raw_ise = ise(grid.raw, truth, grid.step());
          if (config.kernels[k].correct) {
            nonneg_correct(grid);
            const double corr_ise = ise(grid.corrected, truth, grid.step());
            vals[k][r] = corr_ise;
            if (corr_ise > raw_ise + 1e-12) viol[k][r] = 1;
          } else {
            vals[k][r] = raw_ise;
          }
        }
      } catch (const std::exception& e) {
#if defined(_OPENMP)
#pragma omp critical
#endif
        {
          if (first_error.empty()) {
            first_error = "replication " + std::to_string(r) + " (n=" +
                          std::to_string(n) + "): " + e.what();
          }
        }
      }
    }
    if (!first_error.empty()) {
      throw std::runtime_error("mc_mise: " + first_error);
    }

    for (int k = 0; k < nk; ++k) {
      double mean = 0.0;
      for (int r = 0; r < config.reps; ++r) mean += vals[k][r];
      mean /= config.reps;
      double ss = 0.0;
      for (int r = 0; r < config.reps; ++r) {
        const double d = vals[k][r] - mean;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / (config.reps - 1));
      BenchRow row;
      row.dist = config.dist.label();
      row.kernel = config.kernels[k].label.empty() ? kernels[k]->name()
                                                   : config.kernels[k].label;
      row.n = n;
      row.mise = mean;
      row.se = sd / std::sqrt(static_cast<double>(config.reps));
      row.reps = config.reps;
      row.seed = config.seed;
      int nv = 0;
      for (int r = 0; r < config.reps; ++r) nv += viol[k][r];
      row.pathwise_violations = nv;
      report.rows.push_back(std::move(row));
    }
  }

  std::ostringstream fp;
  fp << "dist=" << config.dist.label() << ";kernels=";
  for (std::size_t k = 0; k < config.kernels.size(); ++k) {
    if (k) fp << "|";
    fp << (config.kernels[k].label.empty() ? kernels[k]->name()
                                           : config.kernels[k].label)
       << (config.kernels[k].correct ? ":corrected" : ":raw");
  }
  fp << ";ns=";
  for (std::size_t i = 0; i < config.ns.size(); ++i) {
    if (i) fp << "|";
    fp << config.ns[i];
  }
  fp << ";reps=" << config.reps << ";grid=[" << fmt17(config.grid.lo) << ","
     << fmt17(config.grid.hi) << "]x" << config.grid.m << ";seed=" << config.seed;
  char hash[24];
  std::snprintf(hash, sizeof(hash), ";fp=%016llx",
                static_cast<unsigned long long>(fnv1a(fp.str())));
  report.fingerprint = fp.str() + hash;
  return report;
}

double mise_spectral(const CoefficientVector& cv, const TargetDistribution& dist,
                     double h, int n) {
  if (!(h > 0.0)) throw std::invalid_argument("mise_spectral: h must be positive");
  if (n < 1) throw std::invalid_argument("mise_spectral: n must be >= 1");
  const double big_t = 0.5 / h;

  auto g_of = [&](double s) {
    if (std::abs(s) > 0.5) return 0.0;
    double acc = cv.coeffs[0];
    for (int j = 1; j <= cv.q; ++j) {
      acc += 2.0 * cv.coeffs[j] * std::cos(2.0 * 3.14159265358979323846 * j * s);
    }
    return acc;
  };

  const double variance_main = g_squared_integral(cv) / (n * h);
  const double bias_inside = 2.0 * integrate_chunked(
                                 [&](double t) {
                                   const double g = g_of(h * t) - 1.0;
                                   return g * g * dist.charfn_mod_sq(t);
                                 },
                                 big_t, 1e-10);
  const double phi_inside = 2.0 * integrate_chunked(
                                [&](double t) { return dist.charfn_mod_sq(t); },
                                big_t, 1e-10);
  const double bias_outside = dist.pdf_l2_sq() - phi_inside;
  const double variance_adjust =
      (2.0 / n) * integrate_chunked(
                      [&](double t) {
                        const double g = g_of(h * t);
                        return g * g * dist.charfn_mod_sq(t);
                      },
                      big_t, 1e-10);
  return variance_main + bias_inside + bias_outside - variance_adjust;
}

double mise_spectral(const KernelSpec& spec, const TargetDistribution& dist,
                     double h, int n) {
  if (spec.family != KernelFamily::tsinc) {
    throw std::invalid_argument(
        "mise_spectral: needs a compactly supported trig-polynomial spectral "
        "density (tsinc family)");
  }
  const int q = spec.order / 2;
  const double alpha =
      spec.alpha.has_value() ? *spec.alpha : optimal_alpha(q).alpha_star;
  return mise_spectral(tsinc_coefficients(q, alpha), dist, h, n);
}

double asymptotic_mise_constant(const CoefficientVector& cv,
                                const TargetDistribution& dist) {
  const int p = 2 * cv.q;
  auto integrand = [&](double t) {
    return std::pow(t, 2.0 * p) * dist.charfn_mod_sq(t);
  };
  double total = 2.0 * integrate_chunked(integrand, 1.0, 1e-12);
  double prev_seg = total;
  double a = 1.0;
  bool converged = false;
  for (int k = 0; k < 48; ++k) {
    const double b = 2.0 * a;
    const double seg = 2.0 * adaptive_simpson(integrand, a, b, 1e-12, 40);
    if (k >= 2 && seg >= prev_seg && seg > 1e-12 * std::max(total, 1.0)) {
      throw std::invalid_argument(
          "asymptotic_mise_constant: t^{2p} |phi|^2 integral diverges for this "
          "target");
    }
    total += seg;
    if (seg < 1e-13 * std::max(total, 1e-300)) {
      converged = true;
      break;
    }
    prev_seg = seg;
    a = b;
  }
  if (!converged) {
    throw std::runtime_error("asymptotic_mise_constant: integral did not settle");
  }
  const double gp0 = g_deriv_2q_at_zero(cv);
  double pfact = 1.0;
  for (int i = 2; i <= p; ++i) pfact *= i;
  return g_squared_integral(cv) + gp0 * gp0 / (pfact * pfact) * total;
}

void write_bench_csv(const BenchReport& report, std::ostream& os) {
  os << "distribution,kernel,n,mise,se,reps,seed\n";
  for (const auto& r : report.rows) {
    os << r.dist << "," << r.kernel << "," << r.n << "," << fmt17(r.mise) << ","
       << fmt17(r.se) << "," << r.reps << "," << r.seed << "\n";
  }
}

void print_bench_table(const BenchReport& report, std::ostream& os) {
  if (report.rows.empty()) return;
  std::vector<std::string> kernels;
  std::vector<std::pair<std::string, int>> cells;  // (dist, n) in first-seen order
  for (const auto& r : report.rows) {
    if (std::find(kernels.begin(), kernels.end(), r.kernel) == kernels.end()) {
      kernels.push_back(r.kernel);
    }
    const std::pair<std::string, int> key{r.dist, r.n};
    if (std::find(cells.begin(), cells.end(), key) == cells.end()) {
      cells.push_back(key);
    }
  }
  std::map<std::pair<std::string, std::pair<std::string, int>>, const BenchRow*>
      lookup;
  for (const auto& r : report.rows) {
    lookup[{r.kernel, {r.dist, r.n}}] = &r;
  }

  os << std::left << std::setw(26) << "distribution" << std::setw(7) << "n";
  for (const auto& k : kernels) os << std::setw(22) << k;
  os << "\n";
  for (const auto& cell : cells) {
    double best = 0.0;
    bool first = true;
    for (const auto& k : kernels) {
      auto it = lookup.find({k, cell});
      if (it == lookup.end()) continue;
      if (first || it->second->mise < best) best = it->second->mise;
      first = false;
    }
    os << std::setw(26) << cell.first << std::setw(7) << cell.second;
    for (const auto& k : kernels) {
      auto it = lookup.find({k, cell});
      if (it == lookup.end()) {
        os << std::setw(22) << "-";
        continue;
      }
      const BenchRow& r = *it->second;
      std::string text = (r.mise == best ? "*" : "") + fmt6(r.mise) + " (" +
                         fmt6(r.se) + ")";
      os << std::setw(22) << text;
    }
    os << "\n";
  }
}

}  // namespace hok
