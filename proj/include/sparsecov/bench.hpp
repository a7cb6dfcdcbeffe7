#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparsecov/estimators.hpp"
#include "sparsecov/geometry.hpp"
#include "sparsecov/simulate.hpp"

namespace sparsecov {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchExhaustedError : public std::runtime_error {
 public:
  SearchExhaustedError(const std::string& what, long scanned)
      : std::runtime_error(what), scanned_(scanned) {}

  long scanned() const { return scanned_; }

 private:
  long scanned_;
};

enum class Estimator { kDam, kPem, kAem };
enum class Algorithm { kMusic, kMvdr };

std::string to_string(Estimator e);
std::string to_string(Algorithm a);

struct ExperimentConfig {
  SensorArray array;
  std::vector<double> source_u;
  std::vector<double> snr_db;
  std::vector<int> snapshot_counts;
  int trials = 1;
  std::vector<Estimator> estimators{Estimator::kDam, Estimator::kPem,
                                    Estimator::kAem};
  std::vector<Algorithm> algorithms{Algorithm::kMusic, Algorithm::kMvdr};
  std::uint64_t seed = 1;
  int grid_size = 4001;
  double noise_power = 1.0;
  PemSettings pem_settings;
  int threads = 0;  // 0 = machine parallelism; never affects results
};

// Key/value config text, one "key = value" pair per line, '#' comments.
// Throws ConfigError naming the offending field.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

Scenario make_scenario(const ExperimentConfig& config, double snr_db,
                       int snapshots, std::uint64_t seed);

struct RmseRow {
  double snr_db = 0.0;
  int snapshots = 0;
  Estimator estimator = Estimator::kDam;
  Algorithm algorithm = Algorithm::kMusic;
  double rmse_u = 0.0;
  double rmse_db = 0.0;
  int trials_used = 0;
  int trials_discarded = 0;
};

struct RmseTable {
  std::vector<RmseRow> rows;
};

// Monte-Carlo RMSE sweep over every (snr_db, snapshots) cell. Each trial's
// augmented matrix is computed once and shared by every estimator; a trial
// whose noise eigenvalues are all negative is discarded for every estimator
// in that cell. Deterministic for a given config, regardless of threads.
RmseTable run_rmse_sweep(const ExperimentConfig& config);

void write_rmse_csv(std::ostream& out, const RmseTable& table);
std::string rmse_csv_string(const RmseTable& table);

struct EigStudyCell {
  double snr_db = 0.0;
  // Per-trial statistics, recorded only when the respective subset of noise
  // eigenvalues is non-empty; trial order.
  std::vector<double> min_positive;
  std::vector<double> min_abs_negative;
  long all_negative_trials = 0;
  std::vector<double> bin_edges;  // bins + 1 shared edges
  std::vector<double> pdf_min_positive;
  std::vector<double> pdf_min_abs_negative;
};

struct EigStudyResult {
  int snapshots = 0;
  long realizations = 0;
  std::vector<EigStudyCell> cells;  // one per configured SNR
};

// Distribution study of the smallest positive noise eigenvalue versus the
// smallest absolute negative noise eigenvalue of the augmented matrix.
EigStudyResult run_eig_study(const ExperimentConfig& config,
                             long realizations, int bins);

void write_eig_study_csv(std::ostream& out, const EigStudyCell& cell);

// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct DegenerateDataset {
  std::uint64_t seed = 0;
  Eigen::VectorXd eigenvalues;  // full spectrum, descending value
  Eigen::MatrixXcd dam;
  long scanned = 0;
};

// Scans derived seeds for a dataset whose augmented-matrix noise eigenvalues
// are all negative, verifies the contrasting estimator behavior on it (pem
// raises DegenerateSpectrumError, aem returns a PSD matrix), and returns it.
// Throws SearchExhaustedError after max_search seeds without a hit.
DegenerateDataset find_degenerate_dataset(const ExperimentConfig& config,
                                          long max_search);

}  // namespace sparsecov
