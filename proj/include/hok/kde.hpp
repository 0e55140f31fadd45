#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "hok/kernels.hpp"

namespace hok {

// Equispaced evaluation grid with raw and (optionally) corrected estimates.
struct EstimateGrid {
  double lo = -5.0;
  double hi = 5.0;
  int m = 1001;
  std::vector<double> xs;
  std::vector<double> raw;
  std::vector<double> corrected;  // filled by nonneg_correct
  std::optional<double> xi;
  bool mass_warning = false;  // unit mass required xi < 0 (mass lost off-grid)

  double step() const { return m > 1 ? (hi - lo) / (m - 1) : 0.0; }
};

EstimateGrid make_grid(double lo = -5.0, double hi = 5.0, int m = 1001);

// Composite trapezoid on an equispaced grid.
double trapezoid(const std::vector<double>& y, double step);

// raw[i] = 1/(n h) sum_k K((xs[i] - data[k]) / h). The grid loop is
// OpenMP-parallel; per-point sums run in a fixed order, so results are
// bit-identical for any thread count and to the serial reference below.
void kde_evaluate(const std::vector<double>& data, const Kernel& kernel,
                  double h, EstimateGrid& grid);
void kde_evaluate_serial(const std::vector<double>& data, const Kernel& kernel,
                         double h, EstimateGrid& grid);

// Correction max{0, raw - xi} with xi chosen by bisection so the corrected
// values integrate (trapezoid) to 1 within 1e-10. If even xi = 0 cannot
// reach unit mass the bracket extends below zero; mass_warning is raised
// when the shortfall exceeds 1e-6.
void nonneg_correct(EstimateGrid& grid);

enum class BandwidthKind { nrd, sinc_log, order_rate, fixed };

struct BandwidthRule {
  BandwidthKind kind = BandwidthKind::nrd;
  double fixed_h = 0.0;
};

// Default rule per family: gaussian -> nrd, sinc -> (log(n+1))^{-1/2},
// everything else -> n^{-1/(2p+1)} with p the kernel order.
BandwidthRule auto_rule(KernelFamily family);

double bandwidth(const BandwidthRule& rule, const std::vector<double>& data,
                 const Kernel& kernel);

// R-style type-7 quantile of an ascending-sorted sample.
double quantile_type7(const std::vector<double>& sorted, double p);

// CSV with header "x,raw" or "x,raw,corrected"; 17 significant digits.
void write_grid_csv(const EstimateGrid& grid, std::ostream& os);

}  // namespace hok
