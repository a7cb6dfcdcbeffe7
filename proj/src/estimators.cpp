#include "sparsecov/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace sparsecov {

namespace {

void require_square(const Eigen::MatrixXcd& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
}

void require_source_count(int num_sources, Eigen::Index dim, const char* who) {
  if (num_sources < 1 || num_sources >= dim) {
    throw std::invalid_argument(std::string(who) +
                                ": source count must satisfy 1 <= q < " +
                                std::to_string(dim));
  }
}

}  // namespace

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(scale, 1.0);
}

Eigen::MatrixXcd hermitian_toeplitz(const Eigen::VectorXcd& first_column) {
  const Eigen::Index n = first_column.size();
  if (n == 0) {
    throw std::invalid_argument("hermitian_toeplitz: empty first column");
  }
  Eigen::MatrixXcd m(n, n);
  const double diagonal = first_column(0).real();
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diagonal;
    for (Eigen::Index j = 0; j < i; ++j) {
      m(i, j) = first_column(i - j);
      m(j, i) = std::conj(first_column(i - j));
    }
  }
  return m;
}

double toeplitz_deviation(const Eigen::MatrixXcd& m) {
  require_square(m, "toeplitz_deviation");
  const Eigen::Index n = m.rows();
  double worst = 0.0;
  // Measured against the first entry of each diagonal rather than its mean
  // so that an exactly Toeplitz matrix reads exactly zero.
  for (Eigen::Index k = -(n - 1); k <= n - 1; ++k) {
    const Eigen::Index len = n - std::abs(k);
    const std::complex<double> head = (k >= 0) ? m(k, 0) : m(0, -k);
    for (Eigen::Index i = 1; i < len; ++i) {
      const std::complex<double> entry = (k >= 0) ? m(i + k, i) : m(i, i - k);
      worst = std::max(worst, std::abs(entry - head));
    }
  }
  return worst;
}

Eigen::MatrixXcd scm(const Eigen::MatrixXcd& snapshots) {
  if (snapshots.cols() < 1) {
    throw std::invalid_argument("scm: need at least one snapshot");
  }
  return (snapshots * snapshots.adjoint()) /
         static_cast<double>(snapshots.cols());
}

Eigen::MatrixXcd redundancy_average(const Eigen::MatrixXcd& m) {
  require_square(m, "redundancy_average");
  const Eigen::Index n = m.rows();
  Eigen::VectorXcd column(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    std::complex<double> lower = 0.0;
    std::complex<double> upper = 0.0;
    for (Eigen::Index i = 0; i < n - k; ++i) {
      lower += m(i + k, i);
      upper += m(i, i + k);
    }
    // Average diagonal k together with the conjugate of diagonal -k so the
    // result is Hermitian even for non-Hermitian input.
    column(k) = (lower + std::conj(upper)) / (2.0 * static_cast<double>(n - k));
  }
  return hermitian_toeplitz(column);
}

Eigen::VectorXcd raw_lag_autocorrelation(const Eigen::MatrixXcd& snapshots,
                                         const SensorArray& array) {
  if (snapshots.rows() != array.num_sensors()) {
    throw std::invalid_argument(
        "raw_lag_autocorrelation: snapshot rows do not match the array");
  }
  if (snapshots.cols() < 1) {
    throw std::invalid_argument(
        "raw_lag_autocorrelation: need at least one snapshot");
  }
  const int offset = array.aperture() - 1;
  const int num_sensors = array.num_sensors();
  Eigen::VectorXcd lags = Eigen::VectorXcd::Zero(2 * offset + 1);
  for (Eigen::Index t = 0; t < snapshots.cols(); ++t) {
    for (int i = 0; i < num_sensors; ++i) {
      for (int j = 0; j < num_sensors; ++j) {
        const int lag = array.positions[static_cast<std::size_t>(i)] -
                        array.positions[static_cast<std::size_t>(j)];
        lags(lag + offset) += snapshots(i, t) * std::conj(snapshots(j, t));
      }
    }
  }
  lags /= static_cast<double>(snapshots.cols());
  return lags;
}

LagEstimate lag_sequence(const Eigen::MatrixXcd& snapshots,
                         const SensorArray& array) {
  const Eigen::VectorXcd raw = raw_lag_autocorrelation(snapshots, array);
  LagEstimate estimate;
  estimate.coarray = coarray(array);
  const int extent = estimate.coarray.hole_free_extent;
  const int offset = array.aperture() - 1;
  estimate.values.resize(extent);
  for (int k = 0; k < extent; ++k) {
    estimate.values(k) =
        raw(offset + k) /
        static_cast<double>(estimate.coarray.counts[static_cast<std::size_t>(k)]);
  }
  return estimate;
}

Eigen::MatrixXcd dam(const Eigen::MatrixXcd& snapshots,
                     const SensorArray& array) {
  return hermitian_toeplitz(lag_sequence(snapshots, array).values);
}

EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& m, EigOrder order) {
  require_square(m, "hermitian_eig");
  const Eigen::MatrixXcd symmetrized = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(symmetrized);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: decomposition failed");
  }

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> index(static_cast<std::size_t>(n));
  std::iota(index.begin(), index.end(), 0);
  const Eigen::VectorXd& values = solver.eigenvalues();
  if (order == EigOrder::kDescendingValue) {
    std::stable_sort(index.begin(), index.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return values(a) > values(b);
                     });
  } else {
    std::stable_sort(index.begin(), index.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       const double ma = std::abs(values(a));
                       const double mb = std::abs(values(b));
                       if (ma != mb) return ma > mb;
                       return values(a) > values(b);
                     });
  }

  EigenDecomposition result;
  result.order = order;
  result.eigenvalues.resize(n);
  result.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    result.eigenvalues(k) = values(index[static_cast<std::size_t>(k)]);
    result.eigenvectors.col(k) =
        solver.eigenvectors().col(index[static_cast<std::size_t>(k)]);
  }
  return result;
}

double noise_floor_positive(const Eigen::VectorXd& eigenvalues,
                            int num_sources) {
  require_source_count(num_sources, eigenvalues.size(),
                       "noise_floor_positive");
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index j = num_sources; j < eigenvalues.size(); ++j) {
    if (eigenvalues(j) >= 0.0) {
      sum += eigenvalues(j);
      ++count;
    }
  }
  if (count == 0) {
    throw DegenerateSpectrumError(
        "all noise eigenvalues are negative; positive-eigenvalue noise "
        "average is undefined");
  }
  return sum / count;
}

double noise_floor_absolute(const Eigen::VectorXd& eigenvalues,
                            int num_sources) {
  require_source_count(num_sources, eigenvalues.size(),
                       "noise_floor_absolute");
  double sum = 0.0;
  for (Eigen::Index j = num_sources; j < eigenvalues.size(); ++j) {
    sum += std::abs(eigenvalues(j));
  }
  return sum / static_cast<double>(eigenvalues.size() - num_sources);
}

Eigen::MatrixXcd pem(const Eigen::MatrixXcd& dam_estimate, int num_sources,
                     const PemSettings& settings) {
  require_square(dam_estimate, "pem");
  const Eigen::Index n = dam_estimate.rows();
  require_source_count(num_sources, n, "pem");
  if (!(settings.epsilon > 0.0)) {
    throw std::invalid_argument("pem: epsilon must be positive");
  }
  if (settings.max_iterations < 1) {
    throw std::invalid_argument("pem: max_iterations must be >= 1");
  }

  Eigen::MatrixXcd current = dam_estimate;
  for (int iteration = 0;; ++iteration) {
    const EigenDecomposition eig =
        hermitian_eig(current, EigOrder::kDescendingValue);
    const double smallest = eig.eigenvalues(n - 1);
    // Converged once the noise eigenvalues have collapsed onto one value. A
    // non-positive smallest eigenvalue makes the ratio meaningless and
    // counts as not converged.
    if (smallest > 0.0 &&
        (eig.eigenvalues(num_sources) - smallest) / smallest <
            settings.epsilon) {
      return current;
    }
    if (iteration == settings.max_iterations) {
      throw ConvergenceError(
          "pem: not converged after " +
              std::to_string(settings.max_iterations) + " iterations",
          current);
    }

    const double floor = noise_floor_positive(eig.eigenvalues, num_sources);
    Eigen::MatrixXcd reconstructed =
        floor * Eigen::MatrixXcd::Identity(n, n);
    for (int j = 0; j < num_sources; ++j) {
      reconstructed += (eig.eigenvalues(j) - floor) *
                       (eig.eigenvectors.col(j) *
                        eig.eigenvectors.col(j).adjoint());
    }
    current = redundancy_average(reconstructed);
  }
}

Eigen::MatrixXcd aem(const Eigen::MatrixXcd& dam_estimate, int num_sources,
                     AemInfo* info) {
  require_square(dam_estimate, "aem");
  const Eigen::Index n = dam_estimate.rows();
  require_source_count(num_sources, n, "aem");

  const EigenDecomposition eig =
      hermitian_eig(dam_estimate, EigOrder::kDescendingMagnitude);
  const double floor = noise_floor_absolute(eig.eigenvalues, num_sources);

  Eigen::VectorXd weights(n);
  bool negative_signal = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j < num_sources) {
      weights(j) = eig.eigenvalues(j);
      negative_signal = negative_signal || eig.eigenvalues(j) < 0.0;
    } else {
      weights(j) = floor;
    }
  }
  Eigen::MatrixXcd result =
      eig.eigenvectors * weights.asDiagonal() * eig.eigenvectors.adjoint();
  result = 0.5 * (result + result.adjoint().eval());

  if (info) {
    info->noise_floor = floor;
    info->negative_signal_eigenvalue = negative_signal;
  }
  return result;
}

}  // namespace sparsecov
