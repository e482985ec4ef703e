#ifndef SOSMOM_IO_HPP
#define SOSMOM_IO_HPP

// Dataset text format: a header line "n d" followed by n rows of d floats.

#include "sosmom/core.hpp"
#include "sosmom/sampler.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace sosmom {

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
}

inline Matrix read_matrix(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&]() {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next()) throw ParseError("missing header", lineno + 1);
  long n = 0, d = 0;
  {
    std::istringstream is(line);
    std::string extra;
    if (!(is >> n >> d) || (is >> extra) || n < 1 || d < 1) {
      throw ParseError("malformed header, expected 'n d'", lineno);
    }
  }
  Matrix m(n, d);
  for (long i = 0; i < n; ++i) {
    if (!next()) throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(i), lineno + 1);
    std::istringstream is(line);
    long count = 0;
    std::string tok;
    while (is >> tok) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("bad number '" + tok + "'", lineno);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
      if (count < d) m(i, count) = v;
      ++count;
    }
    if (count != d) {
      throw ParseError("expected " + std::to_string(d) + " values, found " + std::to_string(count), lineno);
    }
  }
  if (next()) throw ParseError("trailing data after " + std::to_string(n) + " rows", lineno);
  return m;
}

inline void write_dataset(std::ostream& out, const Dataset& data) { write_matrix(out, data.samples); }

inline Dataset read_dataset(std::istream& in) {
  Dataset d;
  d.samples = read_matrix(in);
  return d;
}

inline void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_dataset(out, data);
  if (!out) throw Error("write to '" + path + "' failed");
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_dataset(in);
}

}  // namespace sosmom

#endif  // SOSMOM_IO_HPP
