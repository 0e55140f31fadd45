// Command-line surface: inspect kernels, evaluate them on grids, run density
// estimates on user data, run the MISE benchmark, and run the verification
// suite. Exit codes: 0 success, 1 verification failure, 2 input error.

#include <clocale>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hok/kde.hpp"
#include "hok/kernels.hpp"
#include "hok/mise.hpp"
#include "hok/quadrature.hpp"
#include "hok/verify.hpp"

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct GridArg {
  double lo = -5.0;
  double hi = 5.0;
  int count = 1001;
};

GridArg parse_grid(const std::string& text) {
  GridArg g;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw InputError("grid must be lo:hi:count, got '" + text + "'");
  }
  try {
    g.lo = std::stod(text.substr(0, c1));
    g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    g.count = std::stoi(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw InputError("grid must be lo:hi:count, got '" + text + "'");
  }
  if (g.count < 1) throw InputError("grid count must be >= 1");
  if (g.count >= 2 && !(g.lo < g.hi)) throw InputError("grid needs lo < hi");
  return g;
}

std::vector<double> linspace(const GridArg& g) {
  std::vector<double> xs(g.count);
  if (g.count == 1) {
    xs[0] = g.lo;
    return xs;
  }
  const double step = (g.hi - g.lo) / (g.count - 1);
  for (int i = 0; i < g.count; ++i) xs[i] = g.lo + i * step;
  return xs;
}

// One float per line; '#' starts a comment; blank lines are skipped.
std::vector<double> read_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r\n");
    const std::string token = line.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw InputError("line " + std::to_string(lineno) +
                       ": not a number: '" + token + "'");
    }
    if (used != token.size()) {
      throw InputError("line " + std::to_string(lineno) +
                       ": trailing junk: '" + token + "'");
    }
    if (!std::isfinite(v)) {
      throw InputError("line " + std::to_string(lineno) + ": value not finite");
    }
    out.push_back(v);
  }
  if (out.empty()) throw InputError("input file '" + path + "' has no values");
  return out;
}

struct FileConfig {
  std::optional<double> grid_lo;
  std::optional<double> grid_hi;
  std::optional<int> grid_points;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
};

FileConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  FileConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      throw InputError("config line " + std::to_string(lineno) +
                       ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r\n");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "grid_lo") {
        cfg.grid_lo = std::stod(value);
      } else if (key == "grid_hi") {
        cfg.grid_hi = std::stod(value);
      } else if (key == "grid_points") {
        cfg.grid_points = std::stoi(value);
      } else if (key == "reps") {
        cfg.reps = std::stoi(value);
      } else if (key == "seed") {
        cfg.seed = std::stoull(value);
      } else {
        throw InputError("config line " + std::to_string(lineno) +
                         ": unknown key '" + key + "'");
      }
    } catch (const InputError&) {
      throw;
    } catch (const std::exception&) {
      throw InputError("config line " + std::to_string(lineno) +
                       ": bad value for '" + key + "'");
    }
  }
  return cfg;
}

hok::KernelSpec build_spec(const std::string& family, int order,
                           const std::optional<double>& alpha) {
  const auto fam = hok::parse_family(family);
  if (!fam.has_value()) throw InputError("unknown kernel family '" + family + "'");
  hok::KernelSpec spec;
  spec.family = *fam;
  spec.order = order;
  if (*fam == hok::KernelFamily::gaussian || *fam == hok::KernelFamily::sinc) {
    spec.order = 2;  // ignored
  } else if (order < 2 || order % 2 != 0) {
    throw InputError("--order must be even and >= 2");
  }
  if (alpha.has_value()) spec.alpha = *alpha;
  return spec;
}

int cmd_kernel_info(const std::string& family, int order,
                    const std::optional<double>& alpha) {
  const hok::KernelSpec spec = build_spec(family, order, alpha);
  std::cout << "family: " << hok::family_name(spec.family) << "\n";
  if (spec.family == hok::KernelFamily::gaussian) {
    std::cout << "order: 2\nK(0): " << fmt6(1.0 / std::sqrt(2.0 * 3.14159265358979323846)) << "\n";
    return 0;
  }
  if (spec.family == hok::KernelFamily::sinc) {
    std::cout << "order: unbounded\nK(0): "
              << fmt6(1.0 / 3.14159265358979323846) << "\n";
    return 0;
  }
  const int q = spec.order / 2;
  std::cout << "order: " << spec.order << " (q = " << q << ")\n";
  if (spec.family == hok::KernelFamily::tsinc) {
    const hok::AlphaChoice oc = hok::optimal_alpha(q);
    const double a = spec.alpha.has_value() ? *spec.alpha : oc.alpha_star;
    const hok::CoefficientVector cv = hok::tsinc_coefficients(q, a);
    const bool is_opt = std::abs(a - oc.alpha_star) <= 1e-12;
    std::cout << "alpha: " << fmt6(a) << (is_opt ? " (optimal)" : "") << "\n";
    std::cout << "alpha_star: " << fmt6(oc.alpha_star) << "\n";
    std::cout << "C: " << fmt6(oc.c) << "\n";
    std::cout << "coefficients K(0.." << q << "):";
    for (int j = 0; j <= q; ++j) std::cout << " " << fmt6(cv.coeffs[j]);
    std::cout << "\n";
    std::cout << "G^2 integral: " << fmt6(hok::g_squared_integral(cv)) << "\n";
    double top = 0.0;
    for (int j = 1; j <= q; ++j) {
      top += 2.0 * std::pow(static_cast<double>(j), 2.0 * q) * cv.coeffs[j];
    }
    std::cout << "sum j^{2q} K(j): " << fmt6(top) << "\n";
    return 0;
  }
  // g1 / g2 families
  const hok::SpectralDensity g = spec.family == hok::KernelFamily::g1
                                     ? hok::g1_spectral(q)
                                     : hok::g2_spectral(q);
  const double k0 = spec.family == hok::KernelFamily::g1
                        ? hok::eval_g1(q, 0.0)
                        : hok::eval_quadrature_kernel(g, 0.0);
  std::cout << "K(0): " << fmt6(k0) << "\n";
  const double g2int = 2.0 * hok::adaptive_simpson(
                                 [&](double t) {
                                   const double v = g.eval(t);
                                   return v * v;
                                 },
                                 0.0, 0.5, 1e-10, 40);
  std::cout << "G^2 integral: " << fmt6(g2int) << "\n";
  return 0;
}

int cmd_kernel_eval(const std::string& family, int order,
                    const std::optional<double>& alpha, const std::string& grid,
                    const std::string& out_path) {
  const hok::KernelSpec spec = build_spec(family, order, alpha);
  const auto kernel = hok::make_kernel(spec);
  const GridArg g = parse_grid(grid);
  std::ostringstream os;
  os << "u,K\n";
  for (const double u : linspace(g)) {
    os << fmt17(u) << "," << fmt17((*kernel)(u)) << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    f << os.str();
  }
  return 0;
}

int cmd_estimate(const std::string& input, const std::string& family, int order,
                 const std::optional<double>& alpha, const std::string& bw,
                 const GridArg& g, bool correct, const std::string& out_path) {
  const std::vector<double> data = read_samples(input);
  const hok::KernelSpec spec = build_spec(family, order, alpha);
  const auto kernel = hok::make_kernel(spec);

  hok::BandwidthRule rule;
  if (bw == "auto") {
    rule = hok::auto_rule(spec.family);
  } else {
    try {
      rule = {hok::BandwidthKind::fixed, std::stod(bw)};
    } catch (const std::exception&) {
      throw InputError("--bandwidth must be 'auto' or a positive number");
    }
    if (!(rule.fixed_h > 0.0)) {
      throw InputError("--bandwidth must be 'auto' or a positive number");
    }
  }
  const double h = hok::bandwidth(rule, data, *kernel);

  hok::EstimateGrid grid = hok::make_grid(g.lo, g.hi, g.count);
  if (g.count < 2) throw InputError("estimate needs a grid with >= 2 points");
  hok::kde_evaluate(data, *kernel, h, grid);
  if (correct) {
    hok::nonneg_correct(grid);
    if (grid.mass_warning) {
      std::cerr << "warning: estimate mass below 1 on the grid; "
                   "correction used xi = "
                << fmt6(*grid.xi) << "\n";
    }
  }
  std::ostringstream os;
  hok::write_grid_csv(grid, os);
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    f << os.str();
  }
  return 0;
}

int cmd_bench(const std::string& dist_name, double mu, double var, double shape,
              double rate, double p_exponent, const std::vector<int>& ns,
              int reps, const std::vector<std::string>& kernel_names, int order,
              const std::optional<double>& alpha, std::uint64_t seed,
              const GridArg& g, bool raw, const std::string& out_path) {
  hok::BenchConfig config;
  if (dist_name == "normal") {
    config.dist = hok::TargetDistribution::normal(mu, var);
  } else if (dist_name == "gamma") {
    config.dist = hok::TargetDistribution::gamma(shape, rate);
  } else if (dist_name == "lp") {
    config.dist = hok::TargetDistribution::lp_symmetric(p_exponent);
  } else if (dist_name == "fvp") {
    config.dist = hok::TargetDistribution::fvp();
  } else {
    throw InputError("unknown distribution '" + dist_name +
                     "' (expected normal|gamma|lp|fvp)");
  }
  if (ns.empty()) throw InputError("--n needs at least one sample size");
  for (const int n : ns) {
    if (n < 1) throw InputError("--n entries must be >= 1");
  }
  if (reps < 2) throw InputError("--reps must be >= 2");
  if (g.count < 3) throw InputError("bench grid needs >= 3 points");

  for (const auto& name : kernel_names) {
    const auto fam = hok::parse_family(name);
    if (!fam.has_value()) throw InputError("unknown kernel family '" + name + "'");
    if (*fam == hok::KernelFamily::quadrature_g) {
      throw InputError("the quadrature family is too slow for bench; use "
                       "kernel-eval or estimate");
    }
    hok::KernelEntry entry;
    entry.spec = build_spec(name, order, alpha);
    entry.rule = hok::auto_rule(*fam);
    entry.correct = !raw && *fam != hok::KernelFamily::gaussian;
    entry.label = hok::make_kernel(entry.spec)->name();
    config.kernels.push_back(entry);
  }
  config.ns = ns;
  config.reps = reps;
  config.grid = {g.lo, g.hi, g.count};
  config.seed = seed;

  const hok::BenchReport report = hok::mc_mise(config);
  hok::print_bench_table(report, std::cout);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    hok::write_bench_csv(report, f);
  }
  for (const auto& row : report.rows) {
    if (row.pathwise_violations > 0) {
      std::cerr << "warning: " << row.kernel << " n=" << row.n << ": "
                << row.pathwise_violations
                << " replication(s) where correction did not reduce ISE\n";
    }
  }
  return 0;
}

int cmd_verify(double perturb, int reps) {
  hok::verify::Options options;
  options.coeff_perturbation = perturb;
  options.mc_reps = reps;
  const auto results = hok::verify::run_all(options);
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << ": observed=" << fmt6(r.observed)
              << " tolerance=" << fmt6(r.tolerance);
    if (!r.note.empty()) std::cout << " (" << r.note << ")";
    std::cout << "\n";
  }
  const bool ok = hok::verify::all_pass(results);
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"higher-order kernel density estimation lab"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "key = value config file (grid_lo, grid_hi, grid_points, "
                 "reps, seed)");

  // kernel-info
  auto* info = app.add_subcommand("kernel-info", "print kernel constants");
  std::string info_family = "tsinc";
  int info_order = 2;
  double info_alpha = 0.0;
  info->add_option("--family", info_family, "gaussian|sinc|g1|g2|tsinc")
      ->required();
  info->add_option("--order", info_order, "kernel order p (even)");
  auto* info_alpha_opt = info->add_option("--alpha", info_alpha, "tsinc alpha");

  // kernel-eval
  auto* keval = app.add_subcommand("kernel-eval", "evaluate a kernel on a grid");
  std::string keval_family = "tsinc";
  int keval_order = 2;
  double keval_alpha = 0.0;
  std::string keval_grid = "-5:5:101";
  std::string keval_out;
  keval->add_option("--family", keval_family, "gaussian|sinc|g1|g2|tsinc")
      ->required();
  keval->add_option("--order", keval_order, "kernel order p (even)");
  auto* keval_alpha_opt = keval->add_option("--alpha", keval_alpha, "tsinc alpha");
  keval->add_option("--grid", keval_grid, "lo:hi:count");
  keval->add_option("--out", keval_out, "write CSV here instead of stdout");

  // estimate
  auto* est = app.add_subcommand("estimate", "kernel density estimate of a file");
  std::string est_input;
  std::string est_family = "gaussian";
  int est_order = 2;
  double est_alpha = 0.0;
  std::string est_bw = "auto";
  std::string est_grid;
  bool est_correct = false;
  std::string est_out;
  est->add_option("--input", est_input, "one float per line; # comments")
      ->required();
  est->add_option("--family", est_family, "gaussian|sinc|g1|g2|tsinc");
  est->add_option("--order", est_order, "kernel order p (even)");
  auto* est_alpha_opt = est->add_option("--alpha", est_alpha, "tsinc alpha");
  est->add_option("--bandwidth", est_bw, "auto or a positive number");
  est->add_option("--grid", est_grid, "lo:hi:count (default -5:5:1001)");
  est->add_flag("--correct", est_correct, "apply the nonnegativity correction");
  est->add_option("--out", est_out, "write CSV here instead of stdout");

  // bench
  auto* bench = app.add_subcommand("bench", "Monte Carlo MISE benchmark");
  std::string bench_dist = "normal";
  double bench_mu = 0.0;
  double bench_var = 0.1;
  double bench_shape = 2.0;
  double bench_rate = 2.0;
  double bench_p = 3.0;
  std::vector<int> bench_ns;
  int bench_reps = -1;
  std::vector<std::string> bench_kernels{"gaussian", "sinc", "g1", "tsinc"};
  int bench_order = 2;
  double bench_alpha = 0.0;
  std::uint64_t bench_seed = 0;
  bool bench_raw = false;
  std::string bench_grid;
  std::string bench_out;
  bench->add_option("--distribution", bench_dist, "normal|gamma|lp|fvp")
      ->required();
  bench->add_option("--mu", bench_mu, "normal mean (default 0)");
  bench->add_option("--var", bench_var, "normal variance (default 0.1)");
  bench->add_option("--shape", bench_shape, "gamma shape (default 2)");
  bench->add_option("--rate", bench_rate, "gamma rate (default 2)");
  bench->add_option("--p-exponent", bench_p, "lp exponent (default 3)");
  bench->add_option("--n", bench_ns, "sample sizes (default 50,250,500)")
      ->delimiter(',');
  auto* bench_reps_opt = bench->add_option("--reps", bench_reps, "replications");
  bench->add_option("--kernels", bench_kernels, "comma list (default all four)")
      ->delimiter(',');
  bench->add_option("--order", bench_order, "order for g1/tsinc (default 2)");
  auto* bench_alpha_opt = bench->add_option("--alpha", bench_alpha, "tsinc alpha");
  auto* bench_seed_opt = bench->add_option("--seed", bench_seed, "master seed");
  bench->add_flag("--raw", bench_raw, "skip the nonnegativity correction");
  bench->add_option("--grid", bench_grid, "lo:hi:count (default -5:5:1001)");
  bench->add_option("--out", bench_out, "also write CSV here");

  // verify
  auto* ver = app.add_subcommand("verify", "run the verification suite");
  double ver_perturb = 0.0;
  int ver_reps = 300;
  ver->add_option("--perturb-coeffs", ver_perturb,
                  "test hook: offset added to K(1) before the checks");
  ver->add_option("--reps", ver_reps, "replications for spectral-vs-mc");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    FileConfig fcfg;
    if (!config_path.empty()) fcfg = read_config(config_path);
    GridArg default_grid;
    default_grid.lo = fcfg.grid_lo.value_or(-5.0);
    default_grid.hi = fcfg.grid_hi.value_or(5.0);
    default_grid.count = fcfg.grid_points.value_or(1001);

    if (info->parsed()) {
      std::optional<double> a;
      if (info_alpha_opt->count() > 0) a = info_alpha;
      return cmd_kernel_info(info_family, info_order, a);
    }
    if (keval->parsed()) {
      std::optional<double> a;
      if (keval_alpha_opt->count() > 0) a = keval_alpha;
      return cmd_kernel_eval(keval_family, keval_order, a, keval_grid, keval_out);
    }
    if (est->parsed()) {
      std::optional<double> a;
      if (est_alpha_opt->count() > 0) a = est_alpha;
      const GridArg g = est_grid.empty() ? default_grid : parse_grid(est_grid);
      return cmd_estimate(est_input, est_family, est_order, a, est_bw, g,
                          est_correct, est_out);
    }
    if (bench->parsed()) {
      std::optional<double> a;
      if (bench_alpha_opt->count() > 0) a = bench_alpha;
      const GridArg g = bench_grid.empty() ? default_grid : parse_grid(bench_grid);
      if (bench_ns.empty()) bench_ns = {50, 250, 500};
      if (bench_reps_opt->count() == 0) bench_reps = fcfg.reps.value_or(100);
      if (bench_seed_opt->count() == 0) bench_seed = fcfg.seed.value_or(0);
      return cmd_bench(bench_dist, bench_mu, bench_var, bench_shape, bench_rate,
                       bench_p, bench_ns, bench_reps, bench_kernels, bench_order,
                       a, bench_seed, g, bench_raw, bench_out);
    }
    if (ver->parsed()) return cmd_verify(ver_perturb, ver_reps);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
