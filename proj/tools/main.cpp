#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsecov/bench.hpp"
#include "sparsecov/doa.hpp"
#include "sparsecov/estimators.hpp"
#include "sparsecov/geometry.hpp"
#include "sparsecov/matrix_io.hpp"
#include "sparsecov/simulate.hpp"

namespace {

using namespace sparsecov;

std::string format_g9(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", x);
  return buffer;
}

double parse_double_token(const std::string& text, const char* what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw std::invalid_argument(std::string(what) + ": malformed number \"" +
                                text + "\"");
  }
  return value;
}

// --sources takes "u:snr_db" pairs, comma separated.
std::vector<Source> parse_sources(const std::string& text,
                                  double noise_power) {
  std::vector<Source> sources;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = text.find(',', begin);
    const std::string item = text.substr(begin, comma - begin);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument(
          "--sources expects comma-separated u:snr_db pairs");
    }
    const double u = parse_double_token(item.substr(0, colon), "--sources u");
    const double snr_db =
        parse_double_token(item.substr(colon + 1), "--sources snr_db");
    sources.push_back({u, snr_db_to_power(snr_db, noise_power)});
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return sources;
}

void write_text_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

struct ScenarioFlags {
  std::string array_spec;
  std::string sources;
  int snapshots = 1;
  std::uint64_t seed = 0;
  double noise_power = 1.0;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& flags) {
  cmd->add_option("--array", flags.array_spec,
                  "array spec: ula:L, coprime:n1,s1,n2,s2, pos:p0,p1,..., or "
                  "a bare position list")
      ->required();
  cmd->add_option("--sources", flags.sources,
                  "sources as u:snr_db[,u:snr_db...]")
      ->required();
  cmd->add_option("--snapshots", flags.snapshots, "snapshot count T")
      ->default_val(1);
  cmd->add_option("--seed", flags.seed, "64-bit scenario seed")
      ->default_val(0);
  cmd->add_option("--noise-power", flags.noise_power,
                  "noise variance (linear)")
      ->default_val(1.0);
}

Scenario make_cli_scenario(const ScenarioFlags& flags) {
  Scenario scenario;
  scenario.sources = parse_sources(flags.sources, flags.noise_power);
  scenario.noise_power = flags.noise_power;
  scenario.snapshots = flags.snapshots;
  scenario.seed = flags.seed;
  return scenario;
}

Eigen::MatrixXcd compute_estimate(const std::string& estimator,
                                  const Eigen::MatrixXcd& snapshots,
                                  const SensorArray& array, int num_sources,
                                  const PemSettings& settings) {
  if (estimator == "scm") return scm(snapshots);
  if (estimator == "toeplitz") return redundancy_average(scm(snapshots));
  const Eigen::MatrixXcd augmented = dam(snapshots, array);
  if (estimator == "dam") return augmented;
  if (estimator == "pem") return pem(augmented, num_sources, settings);
  if (estimator == "aem") return aem(augmented, num_sources);
  throw std::invalid_argument("unknown estimator " + estimator);
}

// Splices "_snr<value>dB" into a path before its extension.
std::string snr_suffixed_path(const std::string& path, double snr_db) {
  const std::string suffix = "_snr" + format_g9(snr_db) + "dB";
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

int run(int argc, char** argv) {
  CLI::App app{"sparse-array covariance estimation and DOA toolkit"};
  app.require_subcommand(1);

  // geometry
  auto* geometry_cmd =
      app.add_subcommand("geometry", "inspect an array and its coarray");
  std::string geometry_spec;
  geometry_cmd->add_option("--array", geometry_spec, "array spec")
      ->required();
  geometry_cmd->callback([&]() {
    const SensorArray array = parse_array_spec(geometry_spec);
    const Coarray ca = coarray(array);
    std::ostringstream out;
    out << "positions:";
    for (int p : array.positions) out << ' ' << p;
    out << '\n';
    out << "sensors (L_S): " << array.num_sensors() << '\n';
    out << "aperture (L_F): " << array.aperture() << '\n';
    out << "coarray counts:";
    for (int c : ca.counts) out << ' ' << c;
    out << '\n';
    out << "hole-free extent (L_A): " << ca.hole_free_extent << '\n';
    out << (ca.fully_augmentable() ? "fully augmentable"
                                   : "partially augmentable")
        << '\n';
    std::cout << out.str();
  });

  // simulate
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "generate a snapshot matrix and write it as text");
  ScenarioFlags simulate_flags;
  std::string simulate_out;
  add_scenario_flags(simulate_cmd, simulate_flags);
  simulate_cmd->add_option("--out", simulate_out,
                           "output path (default: stdout)");
  simulate_cmd->callback([&]() {
    const SensorArray array = parse_array_spec(simulate_flags.array_spec);
    const Eigen::MatrixXcd snapshots =
        generate_snapshots(make_cli_scenario(simulate_flags), array);
    std::ostringstream out;
    write_matrix(out, snapshots);
    write_text_output(simulate_out, out.str());
  });

  // estimate
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "simulate snapshots and write a covariance estimate");
  ScenarioFlags estimate_flags;
  std::string estimate_out;
  std::string estimate_name = "dam";
  PemSettings estimate_pem;
  add_scenario_flags(estimate_cmd, estimate_flags);
  estimate_cmd
      ->add_option("--estimator", estimate_name,
                   "one of scm, toeplitz, dam, pem, aem")
      ->check(CLI::IsMember({"scm", "toeplitz", "dam", "pem", "aem"}));
  estimate_cmd->add_option("--pem-epsilon", estimate_pem.epsilon,
                           "convergence threshold")
      ->default_val(estimate_pem.epsilon);
  estimate_cmd
      ->add_option("--pem-max-iterations", estimate_pem.max_iterations,
                   "iteration cap")
      ->default_val(estimate_pem.max_iterations);
  estimate_cmd->add_option("--out", estimate_out,
                           "output path (default: stdout)");
  estimate_cmd->callback([&]() {
    const SensorArray array = parse_array_spec(estimate_flags.array_spec);
    const Scenario scenario = make_cli_scenario(estimate_flags);
    const Eigen::MatrixXcd snapshots = generate_snapshots(scenario, array);
    const Eigen::MatrixXcd estimate = compute_estimate(
        estimate_name, snapshots, array,
        static_cast<int>(scenario.sources.size()), estimate_pem);
    std::ostringstream out;
    write_matrix(out, estimate);
    write_text_output(estimate_out, out.str());
  });

  // spectrum
  auto* spectrum_cmd = app.add_subcommand(
      "spectrum", "write a MUSIC or MVDR pseudospectrum as u,power CSV");
  ScenarioFlags spectrum_flags;
  std::string spectrum_out;
  std::string spectrum_estimator = "aem";
  std::string spectrum_algorithm = "music";
  int spectrum_grid = 4001;
  PemSettings spectrum_pem;
  add_scenario_flags(spectrum_cmd, spectrum_flags);
  spectrum_cmd
      ->add_option("--estimator", spectrum_estimator,
                   "augmented estimator: dam, pem, or aem")
      ->check(CLI::IsMember({"dam", "pem", "aem"}));
  spectrum_cmd
      ->add_option("--algorithm", spectrum_algorithm, "music or mvdr")
      ->check(CLI::IsMember({"music", "mvdr"}));
  spectrum_cmd->add_option("--grid", spectrum_grid, "grid point count")
      ->default_val(4001);
  spectrum_cmd->add_option("--out", spectrum_out,
                           "output path (default: stdout)");
  spectrum_cmd->callback([&]() {
    const SensorArray array = parse_array_spec(spectrum_flags.array_spec);
    const Scenario scenario = make_cli_scenario(spectrum_flags);
    const Eigen::MatrixXcd snapshots = generate_snapshots(scenario, array);
    const int q = static_cast<int>(scenario.sources.size());
    const Eigen::MatrixXcd estimate = compute_estimate(
        spectrum_estimator, snapshots, array, q, spectrum_pem);
    const SpectrumGrid spectrum =
        spectrum_algorithm == "music"
            ? music_spectrum(estimate, q, spectrum_grid)
            : mvdr_spectrum(estimate, spectrum_grid);
    std::ostringstream out;
    out << "u,power\n";
    for (Eigen::Index i = 0; i < spectrum.u.size(); ++i) {
      out << format_g9(spectrum.u(i)) << ',' << format_g9(spectrum.power(i))
          << '\n';
    }
    write_text_output(spectrum_out, out.str());
  });

  // bench
  auto* bench_cmd = app.add_subcommand(
      "bench", "run the Monte-Carlo RMSE sweep from a config file");
  std::string bench_config;
  std::string bench_out;
  int bench_threads = -1;
  bench_cmd->add_option("--config", bench_config, "config file path")
      ->required();
  bench_cmd->add_option("--out", bench_out, "rmse CSV path")->required();
  bench_cmd->add_option("--threads", bench_threads,
                        "worker cap (0 = machine parallelism)");
  bench_cmd->callback([&]() {
    ExperimentConfig config = load_config_file(bench_config);
    if (bench_threads >= 0) config.threads = bench_threads;
    const RmseTable table = run_rmse_sweep(config);
    write_text_output(bench_out, rmse_csv_string(table));
    for (const RmseRow& row : table.rows) {
      std::cout << "snr=" << format_g9(row.snr_db) << " T=" << row.snapshots
                << ' ' << to_string(row.estimator) << '-'
                << to_string(row.algorithm)
                << " rmse_u=" << format_g9(row.rmse_u)
                << " used=" << row.trials_used
                << " discarded=" << row.trials_discarded << '\n';
    }
    std::cout << "wrote " << bench_out << '\n';
  });

  // eig-study
  auto* eig_cmd = app.add_subcommand(
      "eig-study",
      "histogram the augmented matrix's extreme noise eigenvalues");
  std::string eig_config;
  std::string eig_out;
  long eig_realizations = 10000;
  int eig_bins = 100;
  int eig_threads = -1;
  eig_cmd->add_option("--config", eig_config, "config file path")->required();
  eig_cmd->add_option("--out", eig_out, "CSV path (suffixed per SNR)")
      ->required();
  eig_cmd->add_option("--realizations", eig_realizations, "trial count")
      ->default_val(10000);
  eig_cmd->add_option("--bins", eig_bins, "histogram bin count")
      ->default_val(100);
  eig_cmd->add_option("--threads", eig_threads,
                      "worker cap (0 = machine parallelism)");
  eig_cmd->callback([&]() {
    ExperimentConfig config = load_config_file(eig_config);
    if (eig_threads >= 0) config.threads = eig_threads;
    const EigStudyResult result =
        run_eig_study(config, eig_realizations, eig_bins);
    for (const EigStudyCell& cell : result.cells) {
      const std::string path = result.cells.size() == 1
                                   ? eig_out
                                   : snr_suffixed_path(eig_out, cell.snr_db);
      std::ostringstream out;
      write_eig_study_csv(out, cell);
      write_text_output(path, out.str());
      std::cout << "snr=" << format_g9(cell.snr_db)
                << " recorded_pos=" << cell.min_positive.size()
                << " recorded_neg=" << cell.min_abs_negative.size()
                << " all_negative=" << cell.all_negative_trials;
      if (!cell.min_positive.empty() && !cell.min_abs_negative.empty()) {
        std::cout << " ks="
                  << format_g9(ks_distance(cell.min_positive,
                                           cell.min_abs_negative));
      }
      std::cout << " wrote " << path << '\n';
    }
  });

  // find-degenerate
  auto* degen_cmd = app.add_subcommand(
      "find-degenerate",
      "scan seeds for a dataset whose noise eigenvalues are all negative");
  std::string degen_config;
  std::string degen_out;
  long degen_max_search = 10000;
  degen_cmd->add_option("--config", degen_config, "config file path")
      ->required();
  degen_cmd->add_option("--max-search", degen_max_search, "seed scan cap")
      ->default_val(10000);
  degen_cmd->add_option("--out", degen_out,
                        "optional path for the found matrix");
  degen_cmd->callback([&]() {
    const ExperimentConfig config = load_config_file(degen_config);
    const DegenerateDataset found =
        find_degenerate_dataset(config, degen_max_search);
    std::cout << "seed: " << found.seed << '\n';
    std::cout << "scanned: " << found.scanned << '\n';
    std::cout << "eigenvalues:";
    for (Eigen::Index j = 0; j < found.eigenvalues.size(); ++j) {
      std::cout << ' ' << format_g9(found.eigenvalues(j));
    }
    std::cout << '\n';
    std::cout << "pem: raises degenerate-spectrum error\n";
    std::cout << "aem: positive semidefinite\n";
    if (!degen_out.empty()) {
      write_matrix_file(degen_out, found.dam);
      std::cout << "wrote " << degen_out << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const DegenerateSpectrumError& e) {
    std::cerr << "error: degenerate spectrum: " << e.what() << '\n';
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const SingularMatrixError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
