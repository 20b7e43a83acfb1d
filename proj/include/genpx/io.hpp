#pragma once

#include <iosfwd>
#include <string>

#include "genpx/genmat.hpp"

namespace genpx {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Text format shared by every tool here:
//   rows cols kind            (kind = real | complex)
//   row-major whitespace-separated entries, complex written as a+bi / a-bi
// Values round-trip through 17 significant digits.
void write_matrix(std::ostream& os, const MatrixVariant& m);
void write_matrix_file(const std::string& path, const MatrixVariant& m);
MatrixVariant read_matrix(std::istream& is);
MatrixVariant read_matrix_file(const std::string& path);

std::string format_scalar(double x);
std::string format_scalar(const cplx& z);
cplx parse_complex_token(const std::string& tok);

// column vectors ride the same format as n x 1 matrices
void write_vector_file(const std::string& path, const std::vector<double>& v);
void write_vector_file(const std::string& path, const std::vector<cplx>& v);

}  // namespace genpx
