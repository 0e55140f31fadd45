// Compares the OpenMP grid evaluation against the serial reference, checks
// that both produce bit-identical estimates, and times a small Monte Carlo
// MISE run with one thread vs all threads.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "hok/kde.hpp"
#include "hok/kernels.hpp"
#include "hok/mise.hpp"

using namespace hok;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#if defined(_OPENMP)
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 4000;
  const int m = argc > 2 ? std::atoi(argv[2]) : 2001;
  const int hw_threads = max_threads();

  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> data(n);
  for (auto& v : data) v = normal(gen);

  std::printf("grid evaluation: n = %d points, m = %d grid nodes, %d threads\n",
              n, m, hw_threads);
  std::printf("%-12s %12s %12s %10s %s\n", "kernel", "serial[ms]", "openmp[ms]",
              "speedup", "identical");

  for (const auto& spec :
       {KernelSpec{KernelFamily::gaussian, 2, std::nullopt, std::nullopt},
        KernelSpec{KernelFamily::sinc, 2, std::nullopt, std::nullopt},
        KernelSpec{KernelFamily::tsinc, 2, std::nullopt, std::nullopt},
        KernelSpec{KernelFamily::g1, 2, std::nullopt, std::nullopt}}) {
    const auto kernel = make_kernel(spec);
    EstimateGrid serial_grid = make_grid(-6.0, 6.0, m);
    EstimateGrid parallel_grid = make_grid(-6.0, 6.0, m);

    const double t0 = now_ms();
    kde_evaluate_serial(data, *kernel, 0.3, serial_grid);
    const double t1 = now_ms();
    kde_evaluate(data, *kernel, 0.3, parallel_grid);
    const double t2 = now_ms();

    bool same = serial_grid.raw.size() == parallel_grid.raw.size();
    for (std::size_t i = 0; same && i < serial_grid.raw.size(); ++i) {
      same = serial_grid.raw[i] == parallel_grid.raw[i];
    }
    std::printf("%-12s %12.2f %12.2f %9.2fx %s\n", kernel->name().c_str(),
                t1 - t0, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
                same ? "yes" : "NO");
    if (!same) return 1;
  }

  BenchConfig config;
  config.dist = TargetDistribution::normal(0.0, 0.1);
  KernelEntry gaussian;
  gaussian.spec = {KernelFamily::gaussian, 2, std::nullopt, std::nullopt};
  gaussian.rule = {BandwidthKind::nrd, 0.0};
  KernelEntry tsinc;
  tsinc.spec = {KernelFamily::tsinc, 2, std::nullopt, std::nullopt};
  tsinc.rule = {BandwidthKind::order_rate, 0.0};
  tsinc.correct = true;
  config.kernels = {gaussian, tsinc};
  config.ns = {250};
  config.reps = 60;
  config.seed = 9;

  set_threads(1);
  const double t0 = now_ms();
  const BenchReport one = mc_mise(config);
  const double t1 = now_ms();
  set_threads(hw_threads);
  const BenchReport many = mc_mise(config);
  const double t2 = now_ms();

  bool same = one.rows.size() == many.rows.size();
  for (std::size_t i = 0; same && i < one.rows.size(); ++i) {
    same = one.rows[i].mise == many.rows[i].mise && one.rows[i].se == many.rows[i].se;
  }
  std::printf(
      "\nmc_mise (normal target, 2 kernels, n=250, 60 reps): 1 thread %.0f ms, "
      "%d threads %.0f ms, speedup %.2fx, identical reports: %s\n",
      t1 - t0, hw_threads, t2 - t1, (t1 - t0) / std::max(t2 - t1, 1e-9),
      same ? "yes" : "NO");
  return same ? 0 : 1;
}
