#ifndef DPP_MATRIX_IO_HPP
#define DPP_MATRIX_IO_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "dpp/types.hpp"

namespace dpp {

// Matrix text format: first line "n m", then n lines of m space-separated
// decimal reals. Values are written in shortest round-trip form, so
// write followed by read reproduces every double bit-exactly.

std::string format_double(double value);
double parse_double(std::string_view text);

void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

void write_matrix_file(const std::string& path, const Matrix& m);
Matrix read_matrix_file(const std::string& path);

}  // namespace dpp

#endif  // DPP_MATRIX_IO_HPP
