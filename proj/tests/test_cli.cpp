#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "sparsecov/estimators.hpp"
#include "sparsecov/matrix_io.hpp"

using namespace sparsecov;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
  CliResult result;
  std::string command = std::string(SPARSECOV_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  while (std::size_t n = std::fread(buffer, 1, sizeof(buffer), pipe))
    result.output.append(buffer, n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("geometry reports the array structure") {
  CliResult r = run_cli("geometry --array coprime:4,3,5,2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("positions: 0 2 3 4 6 8 9") != std::string::npos);
  CHECK(r.output.find("sensors (L_S): 7") != std::string::npos);
  CHECK(r.output.find("aperture (L_F): 10") != std::string::npos);
  CHECK(r.output.find("coarray counts: 7 3 4 3 3 2 3 1 1 1") !=
        std::string::npos);
  CHECK(r.output.find("hole-free extent (L_A): 10") != std::string::npos);
  CHECK(r.output.find("fully augmentable") != std::string::npos);

  CliResult u = run_cli("geometry --array ula:5");
  CHECK(u.exit_code == 0);
  CHECK(u.output.find("hole-free extent (L_A): 5") != std::string::npos);

  CliResult p = run_cli("geometry --array pos:0,1,4");
  CHECK(p.exit_code == 0);
  CHECK(p.output.find("hole-free extent (L_A): 2") != std::string::npos);
  CHECK(p.output.find("partially augmentable") != std::string::npos);

  CliResult bad = run_cli("geometry --array nonsense:1");
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("error") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("geometry").exit_code == 1);           // missing --array
  CHECK(run_cli("frobnicate").exit_code == 1);         // unknown subcommand
  CHECK(run_cli("geometry --array ula:5 --bogus 1").exit_code == 1);
  CHECK(run_cli("estimate --array ula:5 --sources 0:10 --estimator scum "
                "--out x.tmp")
            .exit_code == 1);
  CHECK(run_cli("bench --config no_such.conf --out x.tmp").exit_code == 1);
}

TEST_CASE("help is reachable and lists every subcommand") {
  CliResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  for (const char* name : {"geometry", "simulate", "estimate", "spectrum",
                           "bench", "eig-study", "find-degenerate"})
    CHECK(r.output.find(name) != std::string::npos);
}

TEST_CASE("simulate writes a reproducible snapshot block") {
  const std::string path = "cli_snapshots.tmp";
  std::string args = "simulate --array coprime:4,3,5,2 "
                     "--sources -0.0866:25,0.0866:25 --snapshots 25 --seed 9 "
                     "--out " + path;
  CHECK(run_cli(args).exit_code == 0);
  Eigen::MatrixXcd x = read_matrix_file(path);
  CHECK(x.rows() == 7);
  CHECK(x.cols() == 25);
  std::string first = read_file(path);
  CHECK(run_cli(args).exit_code == 0);
  CHECK(read_file(path) == first);
  std::remove(path.c_str());
}

TEST_CASE("estimate writes the augmented matrix formats") {
  const std::string path = "cli_estimate.tmp";
  std::string scenario = "--array coprime:4,3,5,2 "
                         "--sources -0.0866:25,0.0866:25 --snapshots 25 "
                         "--seed 4 --out " + path;

  CHECK(run_cli("estimate " + scenario + " --estimator dam").exit_code == 0);
  Eigen::MatrixXcd d = read_matrix_file(path);
  CHECK(d.rows() == 10);
  CHECK(d.cols() == 10);
  CHECK(is_hermitian(d));
  CHECK(toeplitz_deviation(d) == 0.0);

  CHECK(run_cli("estimate " + scenario + " --estimator aem").exit_code == 0);
  Eigen::MatrixXcd a = read_matrix_file(path);
  EigenDecomposition e = hermitian_eig(a, EigOrder::kDescendingValue);
  CHECK(e.eigenvalues.minCoeff() >= -1e-10 * e.eigenvalues.maxCoeff());

  CHECK(run_cli("estimate " + scenario + " --estimator pem").exit_code == 0);
  Eigen::MatrixXcd p = read_matrix_file(path);
  CHECK(hermitian_eig(p, EigOrder::kDescendingValue).eigenvalues.minCoeff() >
        0.0);

  CHECK(run_cli("estimate " + scenario + " --estimator scm").exit_code == 0);
  CHECK(read_matrix_file(path).rows() == 7);
  std::remove(path.c_str());
}

TEST_CASE("estimate reports the degenerate case with exit code 2") {
  // Scenario seed under which the T=1 augmented matrix has an all-negative
  // noise spectrum (seed located by the degenerate-search scan).
  CliResult r = run_cli(
      "estimate --array coprime:4,3,5,2 --sources -0.0866:25,0.0866:25 "
      "--snapshots 1 --seed 6292674967507408345 --estimator pem "
      "--out cli_degenerate.tmp");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("degenerate") != std::string::npos);

  CliResult ok = run_cli(
      "estimate --array coprime:4,3,5,2 --sources -0.0866:25,0.0866:25 "
      "--snapshots 1 --seed 6292674967507408345 --estimator aem "
      "--out cli_degenerate.tmp");
  CHECK(ok.exit_code == 0);
  std::remove("cli_degenerate.tmp");
}

TEST_CASE("spectrum exports a grid csv with peaks near the sources") {
  const std::string path = "cli_spectrum.tmp";
  CliResult r = run_cli(
      "spectrum --array coprime:4,3,5,2 --sources -0.0866:25,0.0866:25 "
      "--snapshots 100 --seed 5 --estimator aem --algorithm music "
      "--grid 801 --out " + path);
  CHECK(r.exit_code == 0);
  std::istringstream csv(read_file(path));
  std::string header;
  REQUIRE(std::getline(csv, header));
  CHECK(header == "u,power");
  int rows = 0;
  double best_u = 0.0, best_p = -1.0;
  for (std::string line; std::getline(csv, line);) {
    ++rows;
    std::size_t comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    double u = std::stod(line.substr(0, comma));
    double p = std::stod(line.substr(comma + 1));
    if (p > best_p) {
      best_p = p;
      best_u = u;
    }
  }
  CHECK(rows == 801);
  CHECK(std::abs(std::abs(best_u) - 0.0866) < 0.01);
  std::remove(path.c_str());
}

TEST_CASE("bench runs a config end to end deterministically") {
  const std::string conf = "cli_bench.conf";
  const std::string csv = "cli_bench_out.tmp";
  write_file(conf,
             "array = coprime:4,3,5,2\n"
             "sources = -0.0866,0.0866\n"
             "snr_db = 20\n"
             "snapshots = 10\n"
             "trials = 10\n"
             "estimators = pem, aem\n"
             "algorithms = music\n"
             "seed = 2\n");
  CliResult r = run_cli("bench --config " + conf + " --out " + csv);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("wrote " + csv) != std::string::npos);
  CHECK(r.output.find("rmse_u=") != std::string::npos);
  std::string first = read_file(csv);
  std::istringstream lines(first);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header ==
        "snr_db,snapshots,estimator,algorithm,rmse_u,rmse_db,trials_used,"
        "trials_discarded");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 2);

  CHECK(run_cli("bench --config " + conf + " --out " + csv + " --threads 2")
            .exit_code == 0);
  CHECK(read_file(csv) == first);

  write_file(conf, "array = coprime:4,3,5,2\n");
  CliResult bad = run_cli("bench --config " + conf + " --out " + csv);
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("sources") != std::string::npos);
  std::remove(conf.c_str());
  std::remove(csv.c_str());
}

TEST_CASE("eig-study writes one csv per snr") {
  const std::string conf = "cli_eig.conf";
  write_file(conf,
             "array = coprime:4,3,5,2\n"
             "sources = -0.0866,0.0866\n"
             "snr_db = 0, 10\n"
             "snapshots = 10\n"
             "seed = 6\n");
  CliResult r = run_cli("eig-study --config " + conf +
                        " --realizations 500 --bins 20 --out cli_eig.csv");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ks=") != std::string::npos);
  for (const std::string path : {"cli_eig_snr0dB.csv", "cli_eig_snr10dB.csv"}) {
    std::istringstream csv(read_file(path));
    std::string header;
    REQUIRE(std::getline(csv, header));
    CHECK(header == "bin_left,bin_right,pdf_min_pos,pdf_min_abs_neg");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 20);
    std::remove(path.c_str());
  }
  std::remove(conf.c_str());
}

TEST_CASE("find-degenerate locates and verifies the single-snapshot event") {
  const std::string conf = "cli_degen.conf";
  write_file(conf,
             "array = coprime:4,3,5,2\n"
             "sources = -0.0866,0.0866\n"
             "snr_db = 25\n"
             "snapshots = 1\n");
  CliResult r = run_cli("find-degenerate --config " + conf +
                        " --max-search 15000 --out cli_degen_dam.tmp");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("seed: 12754793056470452992") != std::string::npos);
  CHECK(r.output.find("scanned: 12796") != std::string::npos);
  CHECK(r.output.find("pem: raises degenerate-spectrum error") !=
        std::string::npos);
  CHECK(r.output.find("aem: positive semidefinite") != std::string::npos);
  Eigen::MatrixXcd d = read_matrix_file("cli_degen_dam.tmp");
  CHECK(d.rows() == 10);
  std::remove("cli_degen_dam.tmp");

  CliResult miss = run_cli("find-degenerate --config " + conf +
                           " --max-search 3");
  CHECK(miss.exit_code == 1);
  CHECK(miss.output.find("3") != std::string::npos);
  std::remove(conf.c_str());
}
