#include "dpp/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dpp/errors.hpp"

namespace dpp {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DppError("matrix_io: cannot parse real value '" + std::string(text) + "'");
  }
  return value;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) {
    throw DppError("matrix_io: empty input");
  }
  std::istringstream hs(header);
  long long rows = -1, cols = -1;
  if (!(hs >> rows >> cols) || rows < 0 || cols < 0) {
    throw DppError("matrix_io: malformed header line '" + header + "'");
  }
  Matrix m(rows, cols);
  std::string line, token;
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) {
      throw DppError("matrix_io: unexpected end of input at row " + std::to_string(i));
    }
    std::istringstream ls(line);
    for (long long j = 0; j < cols; ++j) {
      if (!(ls >> token)) {
        throw DppError("matrix_io: row " + std::to_string(i) + " has fewer than " +
                       std::to_string(cols) + " entries");
      }
      m(i, j) = parse_double(token);
    }
    if (ls >> token) {
      throw DppError("matrix_io: row " + std::to_string(i) + " has extra entries");
    }
  }
  if (!all_finite(m)) {
    throw DppError("matrix_io: matrix contains non-finite entries");
  }
  return m;
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw DppError("matrix_io: cannot open '" + path + "' for writing");
  write_matrix(os, m);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DppError("matrix_io: cannot open '" + path + "' for reading");
  return read_matrix(is);
}

}  // namespace dpp
