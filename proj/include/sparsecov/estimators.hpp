#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "sparsecov/geometry.hpp"

namespace sparsecov {

// Every noise eigenvalue of the spectrum is negative, so the
// positive-eigenvalue noise average is undefined.
class DegenerateSpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iteration budget exhausted before the noise-eigenvalue spread test passed.
// Carries the last iterate for inspection.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::MatrixXcd last)
      : std::runtime_error(what), last_(std::move(last)) {}

  const Eigen::MatrixXcd& last_iterate() const { return last_; }

 private:
  Eigen::MatrixXcd last_;
};

bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-10);

// Hermitian Toeplitz matrix with `first_column` down its first column and
// the conjugate sequence along its first row.
Eigen::MatrixXcd hermitian_toeplitz(const Eigen::VectorXcd& first_column);

// Largest |m(i,j) - mean of its diagonal| over the matrix; zero iff Toeplitz.
double toeplitz_deviation(const Eigen::MatrixXcd& m);

// Sample covariance (1/T) * X * X^H.
Eigen::MatrixXcd scm(const Eigen::MatrixXcd& snapshots);

// Projection onto Toeplitz structure: every entry becomes the mean of its
// diagonal, with opposite diagonals conjugate-averaged so the result is
// Hermitian exactly.
Eigen::MatrixXcd redundancy_average(const Eigen::MatrixXcd& m);

// Snapshot-averaged autocorrelation over the full two-sided lag range
// -(L_F-1)..L_F-1, the measurement treated as zero on empty grid points.
// Index k + L_F - 1 holds lag k.
Eigen::VectorXcd raw_lag_autocorrelation(const Eigen::MatrixXcd& snapshots,
                                         const SensorArray& array);

struct LagEstimate {
  Eigen::VectorXcd values;  // unbiased lag estimates, lags 0..L_A-1
  Coarray coarray;
};

// Truncates the raw autocorrelation to the hole-free extent and divides each
// lag by its pair count.
LagEstimate lag_sequence(const Eigen::MatrixXcd& snapshots,
                         const SensorArray& array);

// L_A x L_A Hermitian Toeplitz matrix built from the unbiased lag estimates.
// Not guaranteed positive semi-definite.
Eigen::MatrixXcd dam(const Eigen::MatrixXcd& snapshots,
                     const SensorArray& array);

enum class EigOrder { kDescendingValue, kDescendingMagnitude };

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // column j pairs with eigenvalues[j]
  EigOrder order = EigOrder::kDescendingValue;
};

// Symmetrizes the input as (M + M^H)/2 and decomposes. Magnitude ties break
// by descending signed value, then by original index.
EigenDecomposition hermitian_eig(const Eigen::MatrixXcd& m, EigOrder order);

// Mean of the non-negative entries among eigenvalues[q..n-1] (descending
// order assumed). Throws DegenerateSpectrumError when all of them are
// negative.
double noise_floor_positive(const Eigen::VectorXd& eigenvalues,
                            int num_sources);

// Mean of |eigenvalues[q..n-1]|.
double noise_floor_absolute(const Eigen::VectorXd& eigenvalues,
                            int num_sources);

struct PemSettings {
  double epsilon = 1e-6;
  int max_iterations = 500;
};

// Alternating projection between the positive definite reconstruction and
// Toeplitz structure. Stops when the noise-eigenvalue spread ratio
// (lambda_{q+1} - lambda_n) / lambda_n drops below epsilon; a non-positive
// smallest eigenvalue counts as not converged.
Eigen::MatrixXcd pem(const Eigen::MatrixXcd& dam_estimate, int num_sources,
                     const PemSettings& settings = {});

struct AemInfo {
  double noise_floor = 0.0;
  // A leading-magnitude eigenvalue was negative; it is passed through
  // unchanged, which can make the output indefinite.
  bool negative_signal_eigenvalue = false;
};

// Single-pass estimate: keeps the q leading-magnitude eigenpairs as they are
// and replaces every noise eigenvalue with the mean of their absolute
// values. Never fails on all-negative noise eigenvalues.
Eigen::MatrixXcd aem(const Eigen::MatrixXcd& dam_estimate, int num_sources,
                     AemInfo* info = nullptr);

}  // namespace sparsecov
