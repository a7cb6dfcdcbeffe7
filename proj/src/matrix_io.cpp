#include "sparsecov/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparsecov {

std::string format_complex(std::complex<double> z) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", z.real());
  std::string token = buffer;
  token += std::signbit(z.imag()) ? '-' : '+';
  std::snprintf(buffer, sizeof(buffer), "%.17g", std::abs(z.imag()));
  token += buffer;
  token += 'j';
  return token;
}

std::complex<double> parse_complex(const std::string& token) {
  if (token.empty() || token.back() != 'j') {
    throw std::invalid_argument("parse_complex: expected trailing 'j' in \"" +
                                token + "\"");
  }
  const char* begin = token.c_str();
  char* cursor = nullptr;
  const double re = std::strtod(begin, &cursor);
  if (cursor == begin || (*cursor != '+' && *cursor != '-')) {
    throw std::invalid_argument("parse_complex: malformed token \"" + token +
                                "\"");
  }
  const char* imag_begin = cursor;
  const double im = std::strtod(imag_begin, &cursor);
  if (cursor == imag_begin || cursor != token.c_str() + token.size() - 1) {
    throw std::invalid_argument("parse_complex: malformed token \"" + token +
                                "\"");
  }
  return {re, im};
}

void write_matrix(std::ostream& out, const Eigen::MatrixXcd& m) {
  if (m.rows() == m.cols()) {
    out << m.rows() << '\n';
  } else {
    out << m.rows() << ' ' << m.cols() << '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_complex(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_matrix_file: cannot open " + path);
  }
  write_matrix(out, m);
  if (!out) {
    throw std::runtime_error("write_matrix_file: failed writing " + path);
  }
}

Eigen::MatrixXcd read_matrix(std::istream& in) {
  std::string header;
  while (std::getline(in, header)) {
    if (header.find_first_not_of(" \t\r") != std::string::npos) break;
    header.clear();
  }
  std::istringstream header_stream(header);
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  if (!(header_stream >> rows)) {
    throw std::runtime_error("read_matrix: missing dimension header");
  }
  if (!(header_stream >> cols)) cols = rows;
  std::string trailing;
  if (header_stream >> trailing) {
    throw std::runtime_error("read_matrix: malformed dimension header \"" +
                             header + "\"");
  }
  if (rows < 1 || cols < 1) {
    throw std::runtime_error("read_matrix: dimensions must be positive");
  }

  Eigen::MatrixXcd m(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> token)) {
        throw std::runtime_error("read_matrix: unexpected end of input");
      }
      m(i, j) = parse_complex(token);
    }
  }
  return m;
}

Eigen::MatrixXcd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_matrix_file: cannot open " + path);
  }
  return read_matrix(in);
}

}  // namespace sparsecov
