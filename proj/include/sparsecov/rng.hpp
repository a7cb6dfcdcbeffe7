#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace sparsecov {

// SplitMix64 finalizer. Used to key generators and as the mixing hash that
// derives independent per-trial seeds from (master seed, indices).
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c);

// Standard-normal stream over mt19937_64 with an explicit Box-Muller
// transform. std::normal_distribution's algorithm is implementation-defined,
// so the draws are produced by hand to keep streams identical across
// standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next();

  // Circularly symmetric complex normal: independent real and imaginary
  // parts, each of variance `variance` / 2.
  std::complex<double> next_complex(double variance);

 private:
  double uniform01();  // [0, 1), 53-bit resolution

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sparsecov
