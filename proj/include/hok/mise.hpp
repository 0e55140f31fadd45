#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "hok/distributions.hpp"
#include "hok/kde.hpp"
#include "hok/kernels.hpp"

namespace hok {

// Trapezoid integral of the squared difference between two grid functions.
double ise(const std::vector<double>& est, const std::vector<double>& truth,
           double step);

struct GridSpec {
  double lo = -5.0;
  double hi = 5.0;
  int m = 1001;
};

struct KernelEntry {
  KernelSpec spec;
  BandwidthRule rule;
  bool correct = false;
  std::string label;
};

struct BenchConfig {
  TargetDistribution dist = TargetDistribution::normal(0.0, 0.1);
  std::vector<KernelEntry> kernels;
  std::vector<int> ns{50, 250, 500};
  int reps = 100;
  GridSpec grid;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string dist;
  std::string kernel;
  int n = 0;
  double mise = 0.0;
  double se = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  // replications where the corrected ISE exceeded the raw ISE (expected 0).
  int pathwise_violations = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string fingerprint;
};

// Monte Carlo MISE over config.reps independent replications per sample
// size. One sample per (n, replication) shared by every kernel entry; each
// replication owns a stream derived from (seed, n index, replication index).
// Replications run OpenMP-parallel and reduce in index order, so the report
// is a pure function of the config.
BenchReport mc_mise(const BenchConfig& config);

// Exact MISE of the raw truncated-sinc estimator in spectral form:
//   1/(nh) int G^2 + int (G(ht) - 1)^2 |phi|^2 dt - 1/n int G^2(ht) |phi|^2 dt
// with the middle integral split at |t| = 1/(2h) where G's support ends.
double mise_spectral(const CoefficientVector& cv, const TargetDistribution& dist,
                     double h, int n);
double mise_spectral(const KernelSpec& spec, const TargetDistribution& dist,
                     double h, int n);

// Leading constant int G^2 + (G^{(p)}(0))^2/(p!)^2 int t^{2p} |phi|^2 dt of
// n^{2p/(2p+1)} MISE for h = n^{-1/(2p+1)}, p = 2q. Rejects targets whose
// moment integral diverges (detected by segment growth).
double asymptotic_mise_constant(const CoefficientVector& cv,
                                const TargetDistribution& dist);

// CSV: header "distribution,kernel,n,mise,se,reps,seed", 17 digits.
void write_bench_csv(const BenchReport& report, std::ostream& os);

// Aligned text table, one row per (distribution, n), kernels as columns;
// the smallest entry per row is marked with '*'.
void print_bench_table(const BenchReport& report, std::ostream& os);

}  // namespace hok
