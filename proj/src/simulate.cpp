#include "sparsecov/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsecov/rng.hpp"

namespace sparsecov {

namespace {

void validate(const Scenario& scenario) {
  for (const Source& s : scenario.sources) {
    if (!(s.u >= -1.0 && s.u <= 1.0)) {
      throw std::invalid_argument("scenario: direction cosine outside [-1, 1]");
    }
    if (!(s.power > 0.0)) {
      throw std::invalid_argument("scenario: source power must be positive");
    }
  }
  if (!(scenario.noise_power >= 0.0)) {
    throw std::invalid_argument("scenario: noise power must be non-negative");
  }
  if (scenario.snapshots < 1) {
    throw std::invalid_argument("scenario: snapshot count must be >= 1");
  }
}

}  // namespace

double snr_db_to_power(double snr_db, double noise_power) {
  if (!(noise_power > 0.0)) {
    throw std::invalid_argument("snr_db_to_power: noise power must be positive");
  }
  return noise_power * std::pow(10.0, snr_db / 10.0);
}

Eigen::MatrixXcd generate_snapshots(const Scenario& scenario,
                                    const SensorArray& array) {
  validate(scenario);
  const int num_sensors = array.num_sensors();
  const int num_sources = static_cast<int>(scenario.sources.size());

  Eigen::MatrixXcd steering(num_sensors, num_sources);
  for (int i = 0; i < num_sources; ++i) {
    steering.col(i) = manifold(array.positions, scenario.sources[i].u);
  }

  // Draw order per snapshot is fixed (signals, then per-sensor noise) so the
  // stream is a pure function of the seed.
  GaussianStream stream(scenario.seed);
  Eigen::MatrixXcd data(num_sensors, scenario.snapshots);
  for (int t = 0; t < scenario.snapshots; ++t) {
    Eigen::VectorXcd column = Eigen::VectorXcd::Zero(num_sensors);
    for (int i = 0; i < num_sources; ++i) {
      column += steering.col(i) *
                stream.next_complex(scenario.sources[i].power);
    }
    for (int k = 0; k < num_sensors; ++k) {
      column(k) += stream.next_complex(scenario.noise_power);
    }
    data.col(t) = column;
  }
  return data;
}

Eigen::MatrixXcd ensemble_covariance(const Scenario& scenario,
                                     const SensorArray& array) {
  validate(scenario);
  const int num_sensors = array.num_sensors();
  Eigen::MatrixXcd cov = scenario.noise_power *
                         Eigen::MatrixXcd::Identity(num_sensors, num_sensors);
  for (const Source& s : scenario.sources) {
    const Eigen::VectorXcd v = manifold(array.positions, s.u);
    cov += s.power * (v * v.adjoint());
  }
  return cov;
}

}  // namespace sparsecov
