#include "sparsecov/doa.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "sparsecov/estimators.hpp"

namespace sparsecov {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd make_grid(int grid_size) {
  if (grid_size < 2) {
    throw std::invalid_argument("spectrum grid needs at least 2 points");
  }
  Eigen::VectorXd u(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    u(i) = -1.0 + (2.0 * i) / (grid_size - 1);
  }
  return u;
}

// Virtual-ULA steering vector for positions 0..n-1, built by the phase
// recurrence v_k = v_{k-1} * exp(j*pi*u).
void fill_manifold(double u, Eigen::VectorXcd& v) {
  const std::complex<double> w = std::polar(1.0, kPi * u);
  v(0) = 1.0;
  for (Eigen::Index k = 1; k < v.size(); ++k) v(k) = v(k - 1) * w;
}

void require_hermitian(const Eigen::MatrixXcd& cov, const char* who) {
  if (!is_hermitian(cov)) {
    throw std::invalid_argument(std::string(who) +
                                ": covariance must be Hermitian");
  }
}

}  // namespace

SpectrumGrid music_spectrum(const Eigen::MatrixXcd& cov, int num_sources,
                            int grid_size) {
  require_hermitian(cov, "music_spectrum");
  const Eigen::Index n = cov.rows();
  if (num_sources < 1 || num_sources >= n) {
    throw std::invalid_argument(
        "music_spectrum: source count must satisfy 1 <= q < " +
        std::to_string(n));
  }

  const EigenDecomposition eig = hermitian_eig(cov, EigOrder::kDescendingValue);
  const Eigen::MatrixXcd noise_subspace =
      eig.eigenvectors.rightCols(n - num_sources);

  SpectrumGrid spectrum;
  spectrum.u = make_grid(grid_size);
  spectrum.power.resize(grid_size);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < grid_size; ++i) {
    fill_manifold(spectrum.u(i), v);
    spectrum.power(i) = 1.0 / (noise_subspace.adjoint() * v).squaredNorm();
  }
  return spectrum;
}

SpectrumGrid mvdr_spectrum(const Eigen::MatrixXcd& cov, int grid_size) {
  require_hermitian(cov, "mvdr_spectrum");
  const Eigen::Index n = cov.rows();

  const EigenDecomposition eig = hermitian_eig(cov, EigOrder::kDescendingValue);
  const double largest = eig.eigenvalues(0);
  const double smallest = eig.eigenvalues(n - 1);
  if (!(smallest > 1e-12 * largest)) {
    throw SingularMatrixError(
        "mvdr_spectrum: covariance is singular or indefinite (min eigenvalue " +
        std::to_string(smallest) + ", max " + std::to_string(largest) + ")");
  }
  // R^{-1} applied as ||diag(lambda^{-1/2}) V^H v||^2 so the quadratic form
  // stays positive by construction.
  const Eigen::MatrixXcd whitener =
      eig.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
      eig.eigenvectors.adjoint();

  SpectrumGrid spectrum;
  spectrum.u = make_grid(grid_size);
  spectrum.power.resize(grid_size);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < grid_size; ++i) {
    fill_manifold(spectrum.u(i), v);
    spectrum.power(i) = 1.0 / (whitener * v).squaredNorm();
  }
  return spectrum;
}

DoaEstimate find_peaks(const SpectrumGrid& spectrum, int count, bool refine) {
  const Eigen::Index g = spectrum.u.size();
  if (g < 3) {
    throw std::invalid_argument("find_peaks: grid needs at least 3 points");
  }
  if (spectrum.power.size() != g) {
    throw std::invalid_argument("find_peaks: u/power length mismatch");
  }
  if (count < 1) {
    throw std::invalid_argument("find_peaks: count must be >= 1");
  }

  const Eigen::VectorXd& p = spectrum.power;
  std::vector<Eigen::Index> maxima;
  if (p(0) > p(1)) maxima.push_back(0);
  for (Eigen::Index i = 1; i + 1 < g; ++i) {
    if (p(i) > p(i - 1) && p(i) > p(i + 1)) maxima.push_back(i);
  }
  if (p(g - 1) > p(g - 2)) maxima.push_back(g - 1);

  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return p(a) > p(b); });

  DoaEstimate estimate;
  const std::size_t wanted = static_cast<std::size_t>(count);
  for (std::size_t k = 0; k < maxima.size() && k < wanted; ++k) {
    const Eigen::Index i = maxima[k];
    double u_hat = spectrum.u(i);
    if (refine && i > 0 && i + 1 < g) {
      const double denom = p(i - 1) - 2.0 * p(i) + p(i + 1);
      if (denom < 0.0) {
        const double shift = 0.5 * (p(i - 1) - p(i + 1)) / denom;
        const double step = 0.5 * (spectrum.u(i + 1) - spectrum.u(i - 1));
        u_hat = std::clamp(spectrum.u(i) + shift * step, spectrum.u(i - 1),
                           spectrum.u(i + 1));
      }
    }
    estimate.u_hat.push_back(u_hat);
  }

  if (estimate.u_hat.size() < wanted) {
    estimate.deficient = true;
    std::vector<Eigen::Index> rest(static_cast<std::size_t>(g));
    std::iota(rest.begin(), rest.end(), 0);
    std::stable_sort(rest.begin(), rest.end(), [&](Eigen::Index a,
                                                   Eigen::Index b) {
      return p(a) > p(b);
    });
    for (Eigen::Index i : rest) {
      if (estimate.u_hat.size() == wanted) break;
      if (std::find(maxima.begin(), maxima.end(), i) != maxima.end()) continue;
      estimate.u_hat.push_back(spectrum.u(i));
    }
  }

  std::sort(estimate.u_hat.begin(), estimate.u_hat.end());
  return estimate;
}

double doa_rmse(const std::vector<DoaEstimate>& estimates,
                std::vector<double> truth) {
  if (estimates.empty()) {
    throw std::invalid_argument("doa_rmse: no estimates");
  }
  if (truth.empty()) {
    throw std::invalid_argument("doa_rmse: empty truth");
  }
  std::sort(truth.begin(), truth.end());

  double sum_sq = 0.0;
  for (const DoaEstimate& estimate : estimates) {
    if (estimate.u_hat.size() != truth.size()) {
      throw std::invalid_argument(
          "doa_rmse: estimate length does not match truth");
    }
    // u_hat is kept ascending, so pairing sorted-to-sorted is the
    // minimum-total-squared-error assignment in one dimension.
    std::vector<double> sorted = estimate.u_hat;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const double err = sorted[j] - truth[j];
      sum_sq += err * err;
    }
  }
  return std::sqrt(sum_sq /
                   (static_cast<double>(estimates.size()) *
                    static_cast<double>(truth.size())));
}

double rmse_to_db(double rmse) {
  if (rmse < 0.0) {
    throw std::invalid_argument("rmse_to_db: rmse must be non-negative");
  }
  return 20.0 * std::log10(rmse);
}

}  // namespace sparsecov
