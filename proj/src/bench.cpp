#include "sparsecov/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "sparsecov/doa.hpp"
#include "sparsecov/parallel.hpp"
#include "sparsecov/rng.hpp"

namespace sparsecov {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_g9(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", x);
  return buffer;
}

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = value.find(',', begin);
    items.push_back(trim(value.substr(begin, comma - begin)));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  return items;
}

double parse_double_field(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got \"" + text +
                      "\"");
  }
  return value;
}

long parse_int_field(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const long value = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ConfigError(key + ": expected an integer, got \"" + text + "\"");
  }
  return value;
}

std::uint64_t parse_seed_field(const std::string& key,
                               const std::string& text) {
  if (text.empty() || text[0] == '-') {
    throw ConfigError(key + ": expected an unsigned integer, got \"" + text +
                      "\"");
  }
  const char* begin = text.c_str();
  char* end = nullptr;
  const unsigned long long value = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw ConfigError(key + ": expected an unsigned integer, got \"" + text +
                      "\"");
  }
  return value;
}

Estimator parse_estimator(const std::string& name) {
  if (name == "dam") return Estimator::kDam;
  if (name == "pem") return Estimator::kPem;
  if (name == "aem") return Estimator::kAem;
  throw ConfigError("estimators: unknown estimator \"" + name +
                    "\" (expected dam, pem, or aem)");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "music") return Algorithm::kMusic;
  if (name == "mvdr") return Algorithm::kMvdr;
  throw ConfigError("algorithms: unknown algorithm \"" + name +
                    "\" (expected music or mvdr)");
}

void validate_config(const ExperimentConfig& config) {
  if (config.array.positions.empty()) {
    throw ConfigError("array: no sensor positions");
  }
  if (config.source_u.empty()) throw ConfigError("sources: empty list");
  for (double u : config.source_u) {
    if (!(std::abs(u) <= 1.0)) {
      throw ConfigError("sources: direction cosine " + format_g9(u) +
                        " outside [-1, 1]");
    }
  }
  if (config.snr_db.empty()) throw ConfigError("snr_db: empty list");
  if (config.snapshot_counts.empty()) {
    throw ConfigError("snapshots: empty list");
  }
  for (int t : config.snapshot_counts) {
    if (t < 1) throw ConfigError("snapshots: counts must be >= 1");
  }
  if (config.trials < 1) throw ConfigError("trials: must be >= 1");
  if (config.estimators.empty()) throw ConfigError("estimators: empty list");
  if (config.algorithms.empty()) throw ConfigError("algorithms: empty list");
  if (config.grid_size < 2) throw ConfigError("grid: must be >= 2");
  if (!(config.noise_power > 0.0)) {
    throw ConfigError("noise_power: must be > 0");
  }
  if (!(config.pem_settings.epsilon > 0.0)) {
    throw ConfigError("pem_epsilon: must be > 0");
  }
  if (config.pem_settings.max_iterations < 1) {
    throw ConfigError("pem_max_iterations: must be >= 1");
  }
  if (config.threads < 0) throw ConfigError("threads: must be >= 0");

  const int extent = coarray(config.array).hole_free_extent;
  if (static_cast<int>(config.source_u.size()) >= extent) {
    throw ConfigError("sources: need fewer sources (" +
                      std::to_string(config.source_u.size()) +
                      ") than the hole-free coarray extent (" +
                      std::to_string(extent) + ")");
  }
}

// One trial's results for every (estimator, algorithm) pair, written into a
// preassigned slot so parallel execution stays deterministic.
struct TrialSlot {
  bool shared_discard = false;
  std::vector<char> pair_ok;
  std::vector<DoaEstimate> pair_estimate;
};

Eigen::VectorXd noise_eigenvalues(const Eigen::MatrixXcd& augmented,
                                  int num_sources) {
  const EigenDecomposition eig =
      hermitian_eig(augmented, EigOrder::kDescendingValue);
  return eig.eigenvalues.tail(eig.eigenvalues.size() - num_sources);
}

bool all_negative(const Eigen::VectorXd& values) {
  return (values.array() < 0.0).all();
}

}  // namespace

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::kDam: return "dam";
    case Estimator::kPem: return "pem";
    case Estimator::kAem: return "aem";
  }
  throw std::logic_error("to_string: bad estimator");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMusic: return "music";
    case Algorithm::kMvdr: return "mvdr";
  }
  throw std::logic_error("to_string: bad algorithm");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  std::vector<std::string> seen;
  bool have_array = false;
  bool have_sources = false;
  bool have_snr = false;
  bool have_snapshots = false;

  std::istringstream lines(text);
  std::string line;
  int line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t equals = line.find('=');
    if (equals == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected \"key = value\"");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected \"key = value\"");
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError("duplicate key \"" + key + "\"");
    }
    seen.push_back(key);

    if (key == "array") {
      config.array = parse_array_spec(value);
      have_array = true;
    } else if (key == "sources") {
      config.source_u.clear();
      for (const std::string& item : split_list(value)) {
        config.source_u.push_back(parse_double_field("sources", item));
      }
      have_sources = true;
    } else if (key == "snr_db") {
      config.snr_db.clear();
      for (const std::string& item : split_list(value)) {
        config.snr_db.push_back(parse_double_field("snr_db", item));
      }
      have_snr = true;
    } else if (key == "snapshots") {
      config.snapshot_counts.clear();
      for (const std::string& item : split_list(value)) {
        config.snapshot_counts.push_back(
            static_cast<int>(parse_int_field("snapshots", item)));
      }
      have_snapshots = true;
    } else if (key == "trials") {
      config.trials = static_cast<int>(parse_int_field("trials", value));
    } else if (key == "estimators") {
      config.estimators.clear();
      for (const std::string& item : split_list(value)) {
        const Estimator e = parse_estimator(item);
        if (std::find(config.estimators.begin(), config.estimators.end(),
                      e) != config.estimators.end()) {
          throw ConfigError("estimators: duplicate \"" + item + "\"");
        }
        config.estimators.push_back(e);
      }
    } else if (key == "algorithms") {
      config.algorithms.clear();
      for (const std::string& item : split_list(value)) {
        const Algorithm a = parse_algorithm(item);
        if (std::find(config.algorithms.begin(), config.algorithms.end(),
                      a) != config.algorithms.end()) {
          throw ConfigError("algorithms: duplicate \"" + item + "\"");
        }
        config.algorithms.push_back(a);
      }
    } else if (key == "seed") {
      config.seed = parse_seed_field("seed", value);
    } else if (key == "grid") {
      config.grid_size = static_cast<int>(parse_int_field("grid", value));
    } else if (key == "noise_power") {
      config.noise_power = parse_double_field("noise_power", value);
    } else if (key == "pem_epsilon") {
      config.pem_settings.epsilon = parse_double_field("pem_epsilon", value);
    } else if (key == "pem_max_iterations") {
      config.pem_settings.max_iterations =
          static_cast<int>(parse_int_field("pem_max_iterations", value));
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_int_field("threads", value));
    } else {
      throw ConfigError("unknown key \"" + key + "\"");
    }
  }

  if (!have_array) throw ConfigError("missing required key \"array\"");
  if (!have_sources) throw ConfigError("missing required key \"sources\"");
  if (!have_snr) throw ConfigError("missing required key \"snr_db\"");
  if (!have_snapshots) {
    throw ConfigError("missing required key \"snapshots\"");
  }

  try {
    validate_config(config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

Scenario make_scenario(const ExperimentConfig& config, double snr_db,
                       int snapshots, std::uint64_t seed) {
  Scenario scenario;
  scenario.noise_power = config.noise_power;
  scenario.snapshots = snapshots;
  scenario.seed = seed;
  const double power = snr_db_to_power(snr_db, config.noise_power);
  scenario.sources.reserve(config.source_u.size());
  for (double u : config.source_u) {
    scenario.sources.push_back({u, power});
  }
  return scenario;
}

RmseTable run_rmse_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const int q = static_cast<int>(config.source_u.size());
  const std::size_t num_estimators = config.estimators.size();
  const std::size_t num_algorithms = config.algorithms.size();
  const std::size_t pairs = num_estimators * num_algorithms;

  RmseTable table;
  for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
    for (std::size_t ti = 0; ti < config.snapshot_counts.size(); ++ti) {
      const double snr_db = config.snr_db[si];
      const int snapshots = config.snapshot_counts[ti];

      std::vector<TrialSlot> slots(static_cast<std::size_t>(config.trials));
      parallel_for(config.trials, config.threads, [&](long trial) {
        TrialSlot& slot = slots[static_cast<std::size_t>(trial)];
        const std::uint64_t seed =
            derive_seed(config.seed, si, ti, static_cast<std::uint64_t>(trial));
        const Scenario scenario =
            make_scenario(config, snr_db, snapshots, seed);
        const Eigen::MatrixXcd snapshot_matrix =
            generate_snapshots(scenario, config.array);
        const Eigen::MatrixXcd augmented = dam(snapshot_matrix, config.array);

        if (all_negative(noise_eigenvalues(augmented, q))) {
          slot.shared_discard = true;
          return;
        }

        slot.pair_ok.assign(pairs, 0);
        slot.pair_estimate.assign(pairs, DoaEstimate{});
        for (std::size_t e = 0; e < num_estimators; ++e) {
          Eigen::MatrixXcd matrix;
          try {
            switch (config.estimators[e]) {
              case Estimator::kDam: matrix = augmented; break;
              case Estimator::kPem:
                matrix = pem(augmented, q, config.pem_settings);
                break;
              case Estimator::kAem: matrix = aem(augmented, q); break;
            }
          } catch (const DegenerateSpectrumError&) {
            continue;
          } catch (const ConvergenceError&) {
            continue;
          }
          for (std::size_t a = 0; a < num_algorithms; ++a) {
            try {
              const SpectrumGrid spectrum =
                  config.algorithms[a] == Algorithm::kMusic
                      ? music_spectrum(matrix, q, config.grid_size)
                      : mvdr_spectrum(matrix, config.grid_size);
              slot.pair_estimate[e * num_algorithms + a] =
                  find_peaks(spectrum, q);
              slot.pair_ok[e * num_algorithms + a] = 1;
            } catch (const SingularMatrixError&) {
            }
          }
        }
      });

      for (std::size_t e = 0; e < num_estimators; ++e) {
        for (std::size_t a = 0; a < num_algorithms; ++a) {
          std::vector<DoaEstimate> kept;
          kept.reserve(slots.size());
          for (const TrialSlot& slot : slots) {
            if (!slot.shared_discard && !slot.pair_ok.empty() &&
                slot.pair_ok[e * num_algorithms + a]) {
              kept.push_back(slot.pair_estimate[e * num_algorithms + a]);
            }
          }
          RmseRow row;
          row.snr_db = snr_db;
          row.snapshots = snapshots;
          row.estimator = config.estimators[e];
          row.algorithm = config.algorithms[a];
          row.trials_used = static_cast<int>(kept.size());
          row.trials_discarded = config.trials - row.trials_used;
          if (kept.empty()) {
            row.rmse_u = kNan;
            row.rmse_db = kNan;
          } else {
            row.rmse_u = doa_rmse(kept, config.source_u);
            row.rmse_db = row.rmse_u > 0.0
                              ? rmse_to_db(row.rmse_u)
                              : -std::numeric_limits<double>::infinity();
          }
          table.rows.push_back(row);
        }
      }
    }
  }
  return table;
}

void write_rmse_csv(std::ostream& out, const RmseTable& table) {
  out << "snr_db,snapshots,estimator,algorithm,rmse_u,rmse_db,trials_used,"
         "trials_discarded\n";
  for (const RmseRow& row : table.rows) {
    out << format_g9(row.snr_db) << ',' << row.snapshots << ','
        << to_string(row.estimator) << ',' << to_string(row.algorithm) << ','
        << format_g9(row.rmse_u) << ',' << format_g9(row.rmse_db) << ','
        << row.trials_used << ',' << row.trials_discarded << '\n';
  }
}

std::string rmse_csv_string(const RmseTable& table) {
  std::ostringstream out;
  write_rmse_csv(out, table);
  return out.str();
}

EigStudyResult run_eig_study(const ExperimentConfig& config,
                             long realizations, int bins) {
  validate_config(config);
  if (realizations < 1) {
    throw std::invalid_argument("run_eig_study: realizations must be >= 1");
  }
  if (bins < 2) {
    throw std::invalid_argument("run_eig_study: bins must be >= 2");
  }
  const int q = static_cast<int>(config.source_u.size());

  EigStudyResult result;
  result.snapshots = config.snapshot_counts.front();
  result.realizations = realizations;

  for (std::size_t si = 0; si < config.snr_db.size(); ++si) {
    EigStudyCell cell;
    cell.snr_db = config.snr_db[si];

    std::vector<double> min_pos_slot(static_cast<std::size_t>(realizations),
                                     kNan);
    std::vector<double> min_neg_slot(static_cast<std::size_t>(realizations),
                                     kNan);
    std::vector<char> all_neg_slot(static_cast<std::size_t>(realizations), 0);

    parallel_for(realizations, config.threads, [&](long trial) {
      const std::uint64_t seed =
          derive_seed(config.seed, si, 0, static_cast<std::uint64_t>(trial));
      const Scenario scenario = make_scenario(config, cell.snr_db,
                                              result.snapshots, seed);
      const Eigen::MatrixXcd snapshot_matrix =
          generate_snapshots(scenario, config.array);
      const Eigen::VectorXd noise =
          noise_eigenvalues(dam(snapshot_matrix, config.array), q);

      double min_pos = kNan;
      double min_neg = kNan;
      for (Eigen::Index j = 0; j < noise.size(); ++j) {
        if (noise(j) > 0.0) {
          min_pos = std::isnan(min_pos) ? noise(j)
                                        : std::min(min_pos, noise(j));
        } else if (noise(j) < 0.0) {
          const double mag = -noise(j);
          min_neg =
              std::isnan(min_neg) ? mag : std::min(min_neg, mag);
        }
      }
      min_pos_slot[static_cast<std::size_t>(trial)] = min_pos;
      min_neg_slot[static_cast<std::size_t>(trial)] = min_neg;
      all_neg_slot[static_cast<std::size_t>(trial)] = all_negative(noise);
    });

    for (long t = 0; t < realizations; ++t) {
      const double pos = min_pos_slot[static_cast<std::size_t>(t)];
      const double neg = min_neg_slot[static_cast<std::size_t>(t)];
      if (!std::isnan(pos)) cell.min_positive.push_back(pos);
      if (!std::isnan(neg)) cell.min_abs_negative.push_back(neg);
      cell.all_negative_trials += all_neg_slot[static_cast<std::size_t>(t)];
    }

    std::vector<double> pooled = cell.min_positive;
    pooled.insert(pooled.end(), cell.min_abs_negative.begin(),
                  cell.min_abs_negative.end());
    if (!pooled.empty()) {
      double lo = *std::min_element(pooled.begin(), pooled.end());
      double hi = *std::max_element(pooled.begin(), pooled.end());
      if (hi == lo) hi = lo + 1.0;
      const double width = (hi - lo) / bins;
      cell.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
      for (int b = 0; b <= bins; ++b) {
        cell.bin_edges[static_cast<std::size_t>(b)] = lo + width * b;
      }
      auto histogram = [&](const std::vector<double>& values) {
        std::vector<double> pdf(static_cast<std::size_t>(bins), 0.0);
        if (values.empty()) return pdf;
        for (double v : values) {
          int b = static_cast<int>((v - lo) / width);
          b = std::clamp(b, 0, bins - 1);
          pdf[static_cast<std::size_t>(b)] += 1.0;
        }
        const double scale = 1.0 / (static_cast<double>(values.size()) * width);
        for (double& p : pdf) p *= scale;
        return pdf;
      };
      cell.pdf_min_positive = histogram(cell.min_positive);
      cell.pdf_min_abs_negative = histogram(cell.min_abs_negative);
    }
    result.cells.push_back(std::move(cell));
  }
  return result;
}

void write_eig_study_csv(std::ostream& out, const EigStudyCell& cell) {
  out << "bin_left,bin_right,pdf_min_pos,pdf_min_abs_neg\n";
  const std::size_t bins =
      cell.bin_edges.empty() ? 0 : cell.bin_edges.size() - 1;
  for (std::size_t b = 0; b < bins; ++b) {
    out << format_g9(cell.bin_edges[b]) << ','
        << format_g9(cell.bin_edges[b + 1]) << ','
        << format_g9(cell.pdf_min_positive[b]) << ','
        << format_g9(cell.pdf_min_abs_negative[b]) << '\n';
  }
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_distance: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double distance = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    distance = std::max(
        distance, std::abs(static_cast<double>(ia) / na -
                           static_cast<double>(ib) / nb));
  }
  return distance;
}

DegenerateDataset find_degenerate_dataset(const ExperimentConfig& config,
                                          long max_search) {
  validate_config(config);
  if (max_search < 1) {
    throw std::invalid_argument(
        "find_degenerate_dataset: max_search must be >= 1");
  }
  const int q = static_cast<int>(config.source_u.size());
  const double snr_db = config.snr_db.front();
  const int snapshots = config.snapshot_counts.front();

  for (long k = 0; k < max_search; ++k) {
    const std::uint64_t seed =
        derive_seed(config.seed, 0, 0, static_cast<std::uint64_t>(k));
    const Scenario scenario = make_scenario(config, snr_db, snapshots, seed);
    const Eigen::MatrixXcd snapshot_matrix =
        generate_snapshots(scenario, config.array);
    const Eigen::MatrixXcd augmented = dam(snapshot_matrix, config.array);
    const EigenDecomposition eig =
        hermitian_eig(augmented, EigOrder::kDescendingValue);
    if (!all_negative(eig.eigenvalues.tail(eig.eigenvalues.size() - q))) {
      continue;
    }

    // Contract check on the found dataset: the positive-eigenvalue estimator
    // must refuse it while the absolute-eigenvalue estimator stays PSD.
    bool pem_degenerate = false;
    try {
      pem(augmented, q, config.pem_settings);
    } catch (const DegenerateSpectrumError&) {
      pem_degenerate = true;
    }
    if (!pem_degenerate) {
      throw std::logic_error(
          "find_degenerate_dataset: pem accepted an all-negative spectrum");
    }
    const EigenDecomposition aem_eig =
        hermitian_eig(aem(augmented, q), EigOrder::kDescendingValue);
    const Eigen::Index n = aem_eig.eigenvalues.size();
    if (aem_eig.eigenvalues(n - 1) <
        -1e-10 * std::abs(aem_eig.eigenvalues(0))) {
      throw std::logic_error(
          "find_degenerate_dataset: aem output is not PSD");
    }

    DegenerateDataset found;
    found.seed = seed;
    found.eigenvalues = eig.eigenvalues;
    found.dam = augmented;
    found.scanned = k + 1;
    return found;
  }
  throw SearchExhaustedError(
      "find_degenerate_dataset: no all-negative spectrum in " +
          std::to_string(max_search) + " seeds",
      max_search);
}

}  // namespace sparsecov
