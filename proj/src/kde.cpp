#include "hok/kde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace hok {

EstimateGrid make_grid(double lo, double hi, int m) {
  if (m < 1) throw std::invalid_argument("make_grid: need at least one point");
  if (m >= 2 && !(lo < hi)) {
    throw std::invalid_argument("make_grid: need lo < hi");
  }
  EstimateGrid g;
  g.lo = lo;
  g.hi = hi;
  g.m = m;
  g.xs.resize(m);
  if (m == 1) {
    g.xs[0] = lo;
  } else {
    const double step = (hi - lo) / (m - 1);
    for (int i = 0; i < m; ++i) g.xs[i] = lo + i * step;
  }
  return g;
}

double trapezoid(const std::vector<double>& y, double step) {
  if (y.size() < 2) return 0.0;
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
  return acc * step;
}

namespace {

void check_kde_args(const std::vector<double>& data, double h) {
  if (data.empty()) throw std::invalid_argument("kde_evaluate: empty sample");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("kde_evaluate: bandwidth must be positive");
  }
}

}  // namespace

void kde_evaluate(const std::vector<double>& data, const Kernel& kernel,
                  double h, EstimateGrid& grid) {
  check_kde_args(data, h);
  const std::int64_t npts = static_cast<std::int64_t>(grid.xs.size());
  grid.raw.assign(grid.xs.size(), 0.0);
  grid.corrected.clear();
  grid.xi.reset();
  const double inv = 1.0 / (h * static_cast<double>(data.size()));
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) if (!omp_in_parallel())
#endif
  for (std::int64_t i = 0; i < npts; ++i) {
    const double x = grid.xs[i];
    double acc = 0.0;
    for (const double d : data) acc += kernel((x - d) / h);
    grid.raw[i] = acc * inv;
  }
}

void kde_evaluate_serial(const std::vector<double>& data, const Kernel& kernel,
                         double h, EstimateGrid& grid) {
  check_kde_args(data, h);
  grid.raw.assign(grid.xs.size(), 0.0);
  grid.corrected.clear();
  grid.xi.reset();
  const double inv = 1.0 / (h * static_cast<double>(data.size()));
  for (std::size_t i = 0; i < grid.xs.size(); ++i) {
    const double x = grid.xs[i];
    double acc = 0.0;
    for (const double d : data) acc += kernel((x - d) / h);
    grid.raw[i] = acc * inv;
  }
}

void nonneg_correct(EstimateGrid& grid) {
  if (grid.raw.size() != grid.xs.size() || grid.raw.size() < 3) {
    throw std::invalid_argument("nonneg_correct: raw estimate missing");
  }
  for (const double v : grid.raw) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("nonneg_correct: raw values must be finite");
    }
  }
  const double max_raw = *std::max_element(grid.raw.begin(), grid.raw.end());
  if (!(max_raw > 0.0)) {
    throw std::invalid_argument("nonneg_correct: estimate has no positive mass");
  }
  const double step = grid.step();
  std::vector<double> clipped(grid.raw.size());
  auto mass = [&](double xi) {
    for (std::size_t i = 0; i < grid.raw.size(); ++i) {
      clipped[i] = std::max(0.0, grid.raw[i] - xi);
    }
    return trapezoid(clipped, step);
  };

  const double m0 = mass(0.0);
  grid.mass_warning = m0 < 1.0 - 1e-6;
  double lo;
  double hi;
  if (m0 >= 1.0) {
    lo = 0.0;
    hi = max_raw;
  } else {
    lo = -1.0;
    hi = 0.0;
    int guard = 0;
    while (mass(lo) < 1.0) {
      lo *= 2.0;
      if (++guard > 60) {
        throw std::runtime_error("nonneg_correct: cannot bracket unit mass");
      }
    }
  }
  // mass(xi) is continuous and nonincreasing with mass(lo) >= 1 >= mass(hi).
  double xi = lo;
  for (int it = 0; it < 200; ++it) {
    xi = 0.5 * (lo + hi);
    const double m = mass(xi);
    if (std::abs(m - 1.0) <= 1e-10) break;
    if (m > 1.0) {
      lo = xi;
    } else {
      hi = xi;
    }
  }
  grid.xi = xi;
  grid.corrected.resize(grid.raw.size());
  for (std::size_t i = 0; i < grid.raw.size(); ++i) {
    grid.corrected[i] = std::max(0.0, grid.raw[i] - xi);
  }
}

BandwidthRule auto_rule(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return {BandwidthKind::nrd, 0.0};
    case KernelFamily::sinc: return {BandwidthKind::sinc_log, 0.0};
    default: return {BandwidthKind::order_rate, 0.0};
  }
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t k = static_cast<std::size_t>(h);
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

double bandwidth(const BandwidthRule& rule, const std::vector<double>& data,
                 const Kernel& kernel) {
  const double n = static_cast<double>(data.size());
  switch (rule.kind) {
    case BandwidthKind::fixed:
      if (!(rule.fixed_h > 0.0)) {
        throw std::invalid_argument("bandwidth: fixed h must be positive");
      }
      return rule.fixed_h;
    case BandwidthKind::sinc_log:
      if (data.empty()) throw std::invalid_argument("bandwidth: empty sample");
      return 1.0 / std::sqrt(std::log(n + 1.0));
    case BandwidthKind::order_rate: {
      if (data.empty()) throw std::invalid_argument("bandwidth: empty sample");
      const int p = kernel.order();
      if (p < 2) {
        throw std::invalid_argument(
            "bandwidth: order-rate rule needs a kernel of finite order");
      }
      return std::pow(n, -1.0 / (2.0 * p + 1.0));
    }
    case BandwidthKind::nrd: {
      if (data.size() < 2) {
        throw std::invalid_argument("bandwidth: nrd needs at least two points");
      }
      const double mean =
          std::accumulate(data.begin(), data.end(), 0.0) / n;
      double ss = 0.0;
      for (const double x : data) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / (n - 1.0));
      std::vector<double> sorted(data);
      std::sort(sorted.begin(), sorted.end());
      const double iqr =
          quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
      double spread = std::min(sd, iqr / 1.34);
      if (spread <= 0.0) spread = std::max(sd, iqr / 1.34);
      if (spread <= 0.0) {
        throw std::invalid_argument("bandwidth: degenerate sample (zero spread)");
      }
      return 1.06 * spread * std::pow(n, -0.2);
    }
  }
  throw std::invalid_argument("bandwidth: unknown rule");
}

void write_grid_csv(const EstimateGrid& grid, std::ostream& os) {
  const bool has_corr = grid.corrected.size() == grid.xs.size();
  os << (has_corr ? "x,raw,corrected\n" : "x,raw\n");
  char buf[96];
  for (std::size_t i = 0; i < grid.xs.size(); ++i) {
    if (has_corr) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", grid.xs[i],
                    grid.raw[i], grid.corrected[i]);
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid.xs[i], grid.raw[i]);
    }
    os << buf;
  }
}

}  // namespace hok
