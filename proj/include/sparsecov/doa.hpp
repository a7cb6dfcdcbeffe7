#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace sparsecov {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pseudospectrum sampled on a uniform direction-cosine grid over [-1, 1].
struct SpectrumGrid {
  Eigen::VectorXd u;
  Eigen::VectorXd power;
};

struct DoaEstimate {
  std::vector<double> u_hat;  // ascending
  bool deficient = false;     // fewer strict maxima than requested
};

// Subspace pseudospectrum 1 / ||E_n^H v(u)||^2 on the virtual ULA manifold
// of the covariance dimension, with E_n the trailing n - q eigenvectors in
// descending-value order.
SpectrumGrid music_spectrum(const Eigen::MatrixXcd& cov, int num_sources,
                            int grid_size);

// Adaptive spectrum 1 / (v(u)^H R^{-1} v(u)). Refuses indefinite or
// near-singular inputs instead of applying diagonal loading.
SpectrumGrid mvdr_spectrum(const Eigen::MatrixXcd& cov, int grid_size);

// The `count` strongest strict local maxima (endpoints eligible against
// their single neighbor), refined by three-point parabolic interpolation
// unless `refine` is false. When fewer maxima exist, pads with the largest
// remaining grid values and sets `deficient`.
DoaEstimate find_peaks(const SpectrumGrid& spectrum, int count,
                       bool refine = true);

// Root mean squared direction-cosine error over all trials and sources.
// Estimates are matched to the truth by the minimum-total-squared-error
// assignment (sorted pairing).
double doa_rmse(const std::vector<DoaEstimate>& estimates,
                std::vector<double> truth);

double rmse_to_db(double rmse);

}  // namespace sparsecov
