#include "genpx/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace genpx {

std::string format_scalar(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_scalar(const cplx& z) {
  std::string s = format_scalar(z.real());
  const double im = z.imag();
  if (im >= 0 || std::isnan(im))
    s += "+" + format_scalar(im);
  else
    s += "-" + format_scalar(-im);
  s += "i";
  return s;
}

cplx parse_complex_token(const std::string& tok) {
  if (tok.empty()) throw IoError("empty complex token");
  if (tok.back() != 'i') {
    // plain real value
    try {
      return cplx(std::stod(tok), 0.0);
    } catch (const std::exception&) {
      throw IoError("bad scalar token '" + tok + "'");
    }
  }
  const std::string body = tok.substr(0, tok.size() - 1);
  // split at the last +/- that is not an exponent sign and not leading
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i > 1; --i) {
    const char c = body[i - 1];
    if ((c == '+' || c == '-') && body[i - 2] != 'e' && body[i - 2] != 'E') {
      split = i - 1;
      break;
    }
  }
  if (split == std::string::npos) throw IoError("bad complex token '" + tok + "'");
  try {
    const double re = std::stod(body.substr(0, split));
    std::string imtxt = body.substr(split);
    if (imtxt == "+") imtxt = "1";
    if (imtxt == "-") imtxt = "-1";
    return cplx(re, std::stod(imtxt));
  } catch (const std::exception&) {
    throw IoError("bad complex token '" + tok + "'");
  }
}

void write_matrix(std::ostream& os, const MatrixVariant& m) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a(0, 0))>;
        os << a.rows() << ' ' << a.cols() << ' '
           << (is_complex_v<T> ? "complex" : "real") << '\n';
        for (std::size_t i = 0; i < a.rows(); ++i) {
          for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) os << ' ';
            os << format_scalar(a(i, j));
          }
          os << '\n';
        }
      },
      m);
}

void write_matrix_file(const std::string& path, const MatrixVariant& m) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_matrix(os, m);
  if (!os) throw IoError("write to '" + path + "' failed");
}

MatrixVariant read_matrix(std::istream& is) {
  std::size_t rows = 0, cols = 0;
  std::string kind;
  if (!(is >> rows >> cols >> kind)) throw IoError("bad matrix header");
  if (rows == 0 || cols == 0) throw IoError("bad matrix shape");
  if (kind == "real") {
    RealMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        std::string tok;
        if (!(is >> tok)) throw IoError("matrix data ended early");
        try {
          m(i, j) = std::stod(tok);
        } catch (const std::exception&) {
          throw IoError("bad scalar token '" + tok + "'");
        }
      }
    return m;
  }
  if (kind == "complex") {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        std::string tok;
        if (!(is >> tok)) throw IoError("matrix data ended early");
        m(i, j) = parse_complex_token(tok);
      }
    return m;
  }
  throw IoError("unknown matrix kind '" + kind + "'");
}

MatrixVariant read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_matrix(is);
}

void write_vector_file(const std::string& path, const std::vector<double>& v) {
  RealMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  write_matrix_file(path, m);
}

void write_vector_file(const std::string& path, const std::vector<cplx>& v) {
  ComplexMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  write_matrix_file(path, m);
}

}  // namespace genpx
