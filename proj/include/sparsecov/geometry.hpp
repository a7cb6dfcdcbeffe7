#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace sparsecov {

// Linear array on the half-wavelength integer grid. Positions are strictly
// increasing and canonicalized so the first sensor sits at grid point 0.
struct SensorArray {
  std::vector<int> positions;

  int num_sensors() const { return static_cast<int>(positions.size()); }

  // L_F: one past the last occupied grid point.
  int aperture() const { return positions.back() + 1; }
};

SensorArray ula(int length);

// Union of two uniform subarrays sharing the origin: {0, s1, ..., (n1-1)s1}
// and {0, s2, ..., (n2-1)s2}, duplicates removed.
SensorArray coprime_interleaved(int count1, int spacing1, int count2, int spacing2);

SensorArray from_positions(std::vector<int> positions);

// Accepts "ula:L", "coprime:n1,s1,n2,s2", "pos:p1,p2,..." or a bare
// comma-separated position list.
SensorArray parse_array_spec(const std::string& spec);

// Difference coarray, non-negative lags. counts[k] is the number of ordered
// sensor pairs (i, j) with d_i - d_j = k; hole_free_extent is the largest L
// such that counts[0..L-1] are all positive.
struct Coarray {
  std::vector<int> counts;
  int hole_free_extent = 0;

  bool fully_augmentable() const {
    return hole_free_extent == static_cast<int>(counts.size());
  }
};

Coarray coarray(const SensorArray& array);

// Steering vector with entries exp(j*pi*u*d_k), u the direction cosine.
Eigen::VectorXcd manifold(const std::vector<int>& positions, double u);

}  // namespace sparsecov
