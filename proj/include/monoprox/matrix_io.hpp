#pragma once

// Plain text matrix format: first line "rows cols", then one line per row
// with space-separated decimals. Vectors are n x 1 (or 1 x n) matrices.

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "monoprox/config.hpp"
#include "monoprox/errors.hpp"

namespace monoprox {

class FormatError : public Error {
 public:
  FormatError(const std::string& what, int line) : Error(what), line_(line) {}
  /// 1-based line within the parsed stream (0 when unknown).
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

inline double parse_number(const std::string& tok, int line_no) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError("expected a number, got '" + tok + "'", line_no);
  }
}

}  // namespace detail

/// Reads one matrix block; `line_no` is advanced past the consumed lines.
inline Matrix read_matrix(std::istream& in, int& line_no) {
  std::string line;
  if (!detail::next_content_line(in, line, line_no))
    throw FormatError("missing 'rows cols' header", line_no);
  std::istringstream header(line);
  long rows = -1, cols = -1;
  std::string extra;
  if (!(header >> rows >> cols) || (header >> extra) || rows <= 0 || cols <= 0)
    throw FormatError("malformed 'rows cols' header: '" + line + "'", line_no);
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    if (!detail::next_content_line(in, line, line_no))
      throw FormatError("expected " + std::to_string(rows) + " rows, got " + std::to_string(i),
                        line_no);
    std::istringstream row(line);
    std::string tok;
    long j = 0;
    while (row >> tok) {
      if (j >= cols)
        throw FormatError("row " + std::to_string(i + 1) + " has more than " +
                              std::to_string(cols) + " entries",
                          line_no);
      m(i, j++) = detail::parse_number(tok, line_no);
    }
    if (j != cols)
      throw FormatError("row " + std::to_string(i + 1) + " has " + std::to_string(j) +
                            " entries, expected " + std::to_string(cols),
                        line_no);
  }
  return m;
}

inline Matrix read_matrix(std::istream& in) {
  int line_no = 0;
  return read_matrix(in, line_no);
}

inline Vector read_vector(std::istream& in, int& line_no) {
  Matrix m = read_matrix(in, line_no);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw FormatError("expected a vector (n x 1 or 1 x n)", line_no);
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
  out.precision(old);
}

inline void write_vector(std::ostream& out, const Vector& v) { write_matrix(out, Matrix(v)); }

}  // namespace monoprox
