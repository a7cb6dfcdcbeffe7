#pragma once

#include <complex>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace sparsecov {

// Plain-text complex matrix format: a header line with the dimension ("n"
// for square matrices, "rows cols" otherwise), then one row per line of
// space-separated "re+imj" literals printed with 17 significant digits, so
// files round-trip 64-bit floats exactly.
void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m);

Eigen::MatrixXcd read_matrix(std::istream& in);
Eigen::MatrixXcd read_matrix_file(const std::string& path);

std::string format_complex(std::complex<double> z);
std::complex<double> parse_complex(const std::string& token);

}  // namespace sparsecov
