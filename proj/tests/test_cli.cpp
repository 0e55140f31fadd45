#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int status = -1;
  std::string out;  // stdout and stderr merged
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(HOK_CLI_PATH) + " " + args + " 2>&1";
  CmdResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (fgets(buf.data(), buf.size(), pipe) != nullptr) r.out += buf.data();
  const int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

fs::path temp_file(const std::string& stem) {
  static int counter = 0;
  return fs::temp_directory_path() /
         (stem + "-" + std::to_string(getpid()) + "-" + std::to_string(counter++));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// parse a CSV with a header into rows of string cells
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("kernel-info reports tsinc constants") {
  const CmdResult r = run_cli("kernel-info --family tsinc --order 2");
  CHECK(r.status == 0);
  CHECK(r.out.find("0.333333") != std::string::npos);        // alpha* and coeffs
  CHECK(r.out.find("(optimal)") != std::string::npos);
  CHECK(r.out.find("C: 0.5") != std::string::npos);

  const CmdResult r4 = run_cli("kernel-info --family tsinc --order 4");
  CHECK(r4.status == 0);
  CHECK(r4.out.find("0.485714") != std::string::npos);   // 17/35
  CHECK(r4.out.find("0.342857") != std::string::npos);   // 12/35
  CHECK(r4.out.find("-0.0857143") != std::string::npos); // -3/35

  const CmdResult g1 = run_cli("kernel-info --family g1 --order 2");
  CHECK(g1.status == 0);
  CHECK(g1.out.find("0.666667") != std::string::npos);
}

TEST_CASE("kernel-info rejects alpha = 1") {
  const CmdResult r = run_cli("kernel-info --family tsinc --order 2 --alpha 1");
  CHECK(r.status == 2);
  CHECK(r.out.find("alpha = 1 degenerates the kernel") != std::string::npos);
}

TEST_CASE("kernel-eval emits the expected CSV values") {
  const CmdResult r = run_cli("kernel-eval --family tsinc --order 2 --grid 0:1:3");
  CHECK(r.status == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "u");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::stod(rows[2][1]) ==
        doctest::Approx(10.0 / (9.0 * 3.14159265358979323846)).epsilon(1e-12));
  CHECK(std::stod(rows[3][1]) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const CmdResult g2 = run_cli("kernel-eval --family g2 --order 2 --grid 0:0:1");
  CHECK(g2.status == 0);
  const auto g2rows = parse_csv(g2.out);
  REQUIRE(g2rows.size() == 2);
  CHECK(std::stod(g2rows[1][1]) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("estimate on a single point") {
  const fs::path input = temp_file("single");
  std::ofstream(input) << "0\n";
  const CmdResult r = run_cli("estimate --input " + input.string() +
                              " --family gaussian --bandwidth 1 --grid -1:1:3");
  CHECK(r.status == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[2][1]) == doctest::Approx(0.398942).epsilon(1e-5));
  fs::remove(input);
}

TEST_CASE("estimate --correct yields a density") {
  const fs::path input = temp_file("normals");
  {
    std::ofstream f(input);
    f << "# forty points\n";
    std::mt19937_64 gen(5);
    for (int i = 0; i < 40; ++i) {
      f << (static_cast<double>(gen() % 2000) / 1000.0 - 1.0) << "\n";
    }
  }
  const CmdResult r = run_cli("estimate --input " + input.string() +
                              " --family sinc --bandwidth auto --grid -8:8:1601 "
                              "--correct");
  CHECK(r.status == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 1602);
  REQUIRE(rows[0].size() == 3);
  double integral = 0.0;
  std::vector<double> corrected;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    corrected.push_back(std::stod(rows[i][2]));
  }
  const double step = 16.0 / 1600.0;
  integral = 0.5 * (corrected.front() + corrected.back());
  for (std::size_t i = 1; i + 1 < corrected.size(); ++i) integral += corrected[i];
  integral *= step;
  CHECK(std::abs(integral - 1.0) < 1e-8);
  for (const double v : corrected) CHECK(v >= 0.0);
  fs::remove(input);
}

TEST_CASE("estimate rejects malformed input with a line number") {
  const fs::path input = temp_file("bad");
  std::ofstream(input) << "abc\n1.5\n";
  const CmdResult r =
      run_cli("estimate --input " + input.string() + " --family gaussian");
  CHECK(r.status == 2);
  CHECK(r.out.find("line 1") != std::string::npos);
  fs::remove(input);

  const fs::path empty = temp_file("empty");
  std::ofstream(empty) << "# nothing\n\n";
  const CmdResult e =
      run_cli("estimate --input " + empty.string() + " --family gaussian");
  CHECK(e.status == 2);
  fs::remove(empty);

  const CmdResult missing = run_cli("estimate --input /no/such/file.txt");
  CHECK(missing.status == 2);
}

TEST_CASE("unknown flags are rejected") {
  const CmdResult r = run_cli("kernel-info --family tsinc --bogus 3");
  CHECK(r.status == 2);
}

TEST_CASE("bench is byte-identical across runs") {
  const fs::path out1 = temp_file("bench1");
  const fs::path out2 = temp_file("bench2");
  const std::string args =
      "bench --distribution normal --n 40 --reps 5 --kernels gaussian,tsinc "
      "--seed 7 --out ";
  const CmdResult r1 = run_cli(args + out1.string());
  const CmdResult r2 = run_cli(args + out2.string());
  CHECK(r1.status == 0);
  CHECK(r2.status == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1).rfind("distribution,kernel,n,mise,se,reps,seed\n", 0) == 0);
  CHECK(r1.out.find("*") != std::string::npos);  // winner marked
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("bench on the fvp target: rows parse and gaussian wins") {
  // With the unit-integral g1 kernel, gaussian wins fvp decisively (the
  // acceptance suite documents how this relates to the reference table).
  const fs::path out = temp_file("benchfvp");
  const CmdResult r = run_cli(
      "bench --distribution fvp --n 50 --reps 20 --kernels gaussian,g1 --seed 7 "
      "--out " +
      out.string());
  CHECK(r.status == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 3);
  double gaussian_mise = 0.0;
  double g1_mise = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "gaussian") gaussian_mise = std::stod(rows[i][3]);
    if (rows[i][1] == "g1-p2") g1_mise = std::stod(rows[i][3]);
  }
  CHECK(g1_mise > 0.0);
  CHECK(gaussian_mise > 0.0);
  CHECK(gaussian_mise < g1_mise);
  fs::remove(out);
}

TEST_CASE("bench MISE decreases with n (1.5x slack)") {
  const fs::path out = temp_file("benchn");
  const CmdResult r = run_cli(
      "bench --distribution normal --n 50,250,500 --reps 20 --kernels tsinc "
      "--order 2 --seed 11 --out " +
      out.string());
  CHECK(r.status == 0);
  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 4);
  const double m50 = std::stod(rows[1][3]);
  const double m500 = std::stod(rows[3][3]);
  CHECK(m500 < 1.5 * m50);
  fs::remove(out);
}

TEST_CASE("config file supplies defaults that flags override") {
  const fs::path cfg = temp_file("cfg");
  std::ofstream(cfg) << "# defaults\nreps = 5\nseed = 7\ngrid_lo = -4\n"
                     << "grid_hi = 4\ngrid_points = 401\n";
  const fs::path out1 = temp_file("bench-cfg");
  const CmdResult r1 = run_cli("--config " + cfg.string() +
                               " bench --distribution normal --n 40 --kernels "
                               "gaussian --out " +
                               out1.string());
  CHECK(r1.status == 0);
  const auto rows = parse_csv(slurp(out1));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][5] == "5");  // reps from config
  CHECK(rows[1][6] == "7");  // seed from config

  // explicit flag wins over the config value
  const fs::path out2 = temp_file("bench-cfg2");
  const CmdResult r2 = run_cli("--config " + cfg.string() +
                               " bench --distribution normal --n 40 --reps 6 "
                               "--kernels gaussian --out " +
                               out2.string());
  CHECK(r2.status == 0);
  CHECK(parse_csv(slurp(out2))[1][5] == "6");

  const fs::path bad = temp_file("badcfg");
  std::ofstream(bad) << "nonsense = 3\n";
  const CmdResult rb = run_cli("--config " + bad.string() +
                               " bench --distribution normal --kernels gaussian");
  CHECK(rb.status == 2);
  fs::remove(cfg);
  fs::remove(bad);
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("verify passes clean and fails under coefficient perturbation") {
  const CmdResult ok = run_cli("verify --reps 60");
  CHECK(ok.status == 0);
  CHECK(ok.out.find("[PASS]") != std::string::npos);
  CHECK(ok.out.find("[FAIL]") == std::string::npos);
  CHECK(ok.out.find("tolerance=") != std::string::npos);
  CHECK(ok.out.find("observed=") != std::string::npos);

  const CmdResult bad = run_cli("verify --reps 60 --perturb-coeffs 1e-3");
  CHECK(bad.status == 1);
  CHECK(bad.out.find("[FAIL] vanishing-moments") != std::string::npos);
}
