#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sparsecov/geometry.hpp"

namespace sparsecov {

// One wide-sense-stationary planewave: direction cosine and linear power.
struct Source {
  double u = 0.0;
  double power = 1.0;
};

struct Scenario {
  std::vector<Source> sources;
  double noise_power = 1.0;
  int snapshots = 1;
  std::uint64_t seed = 0;
};

double snr_db_to_power(double snr_db, double noise_power);

// L_S x T measurement block: column t is the superposition of the planewave
// signals plus white circular complex Gaussian noise. The draw stream is
// fully determined by scenario.seed.
Eigen::MatrixXcd generate_snapshots(const Scenario& scenario,
                                    const SensorArray& array);

// Analytic covariance: sum_i power_i v(u_i) v(u_i)^H + noise_power * I.
Eigen::MatrixXcd ensemble_covariance(const Scenario& scenario,
                                     const SensorArray& array);

}  // namespace sparsecov
