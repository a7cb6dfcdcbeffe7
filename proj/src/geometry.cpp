#include "sparsecov/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sparsecov {

namespace {

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string token = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const char* begin = token.c_str();
    char* end = nullptr;
    long value = std::strtol(begin, &end, 10);
    while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    if (end == begin || (end && *end)) {
      throw std::invalid_argument(std::string(what) + ": bad integer '" +
                                  token + "'");
    }
    values.push_back(static_cast<int>(value));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

}  // namespace

SensorArray ula(int length) {
  if (length < 1) throw std::invalid_argument("ula: length must be >= 1");
  std::vector<int> positions(static_cast<std::size_t>(length));
  std::iota(positions.begin(), positions.end(), 0);
  return SensorArray{std::move(positions)};
}

SensorArray coprime_interleaved(int count1, int spacing1, int count2,
                                int spacing2) {
  if (count1 < 1 || spacing1 < 1 || count2 < 1 || spacing2 < 1) {
    throw std::invalid_argument(
        "coprime_interleaved: counts and spacings must be positive");
  }
  std::set<int> merged;
  for (int k = 0; k < count1; ++k) merged.insert(k * spacing1);
  for (int k = 0; k < count2; ++k) merged.insert(k * spacing2);
  return SensorArray{{merged.begin(), merged.end()}};
}

SensorArray from_positions(std::vector<int> positions) {
  if (positions.empty()) {
    throw std::invalid_argument("from_positions: empty position list");
  }
  for (int p : positions) {
    if (p < 0) {
      throw std::invalid_argument("from_positions: negative position " +
                                  std::to_string(p));
    }
  }
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) !=
      positions.end()) {
    throw std::invalid_argument("from_positions: duplicate position");
  }
  const int origin = positions.front();
  for (int& p : positions) p -= origin;
  return SensorArray{std::move(positions)};
}

SensorArray parse_array_spec(const std::string& spec) {
  if (spec.rfind("ula:", 0) == 0) {
    auto args = parse_int_list(spec.substr(4), "array spec 'ula'");
    if (args.size() != 1) {
      throw std::invalid_argument("array spec 'ula' takes one argument: ula:L");
    }
    return ula(args[0]);
  }
  if (spec.rfind("coprime:", 0) == 0) {
    auto args = parse_int_list(spec.substr(8), "array spec 'coprime'");
    if (args.size() != 4) {
      throw std::invalid_argument(
          "array spec 'coprime' takes four arguments: coprime:n1,s1,n2,s2");
    }
    return coprime_interleaved(args[0], args[1], args[2], args[3]);
  }
  std::string list = spec;
  if (spec.rfind("pos:", 0) == 0) list = spec.substr(4);
  return from_positions(parse_int_list(list, "array spec"));
}

Coarray coarray(const SensorArray& array) {
  Coarray result;
  result.counts.assign(static_cast<std::size_t>(array.aperture()), 0);
  for (int a : array.positions) {
    for (int b : array.positions) {
      if (a >= b) ++result.counts[static_cast<std::size_t>(a - b)];
    }
  }
  int extent = 0;
  while (extent < static_cast<int>(result.counts.size()) &&
         result.counts[static_cast<std::size_t>(extent)] > 0) {
    ++extent;
  }
  result.hole_free_extent = extent;
  return result;
}

Eigen::VectorXcd manifold(const std::vector<int>& positions, double u) {
  if (!(u >= -1.0 && u <= 1.0)) {
    throw std::invalid_argument("manifold: direction cosine outside [-1, 1]");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(positions.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v(k) = std::polar(1.0, std::numbers::pi * u *
                               positions[static_cast<std::size_t>(k)]);
  }
  return v;
}

}  // namespace sparsecov
