#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace genpx {

using cplx = std::complex<double>;

template <typename T> struct is_complex : std::false_type {};
template <typename T> struct is_complex<std::complex<T>> : std::true_type {};
template <typename T> inline constexpr bool is_complex_v = is_complex<T>::value;

// common scalar of a mixed real/complex expression
template <typename A, typename B>
using promote_t = std::conditional_t<is_complex_v<A> || is_complex_v<B>, cplx, double>;

inline double abs2(double x) { return x * x; }
inline double abs2(const cplx& x) { return x.real() * x.real() + x.imag() * x.imag(); }

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Dense row-major matrix over double or complex<double>.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  T* row(std::size_t i) { return data_.data() + i * cols_; }
  const T* row(std::size_t i) const { return data_.data() + i * cols_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<const T> span() const { return {data_.data(), data_.size()}; }

  Matrix block(std::size_t i0, std::size_t j0, std::size_t r, std::size_t c) const {
    assert(i0 + r <= rows_ && j0 + c <= cols_);
    Matrix b(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) b(i, j) = (*this)(i0 + i, j0 + j);
    return b;
  }

  void set_block(std::size_t i0, std::size_t j0, const Matrix& b) {
    assert(i0 + b.rows() <= rows_ && j0 + b.cols() <= cols_);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(i0 + i, j0 + j) = b(i, j);
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix conj_transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) {
        if constexpr (is_complex_v<T>)
          t(j, i) = std::conj((*this)(i, j));
        else
          t(j, i) = (*this)(i, j);
      }
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(T s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<cplx>;

inline ComplexMatrix promote(const RealMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  return c;
}
inline const ComplexMatrix& promote(const ComplexMatrix& a) { return a; }

template <typename T>
RealMatrix real_part(const Matrix<T>& a) {
  RealMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if constexpr (is_complex_v<T>)
        r(i, j) = a(i, j).real();
      else
        r(i, j) = a(i, j);
    }
  return r;
}

// C = A * B, vectorizable i-k-j order
template <typename TA, typename TB>
Matrix<promote_t<TA, TB>> matmul(const Matrix<TA>& a, const Matrix<TB>& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
  using TP = promote_t<TA, TB>;
  Matrix<TP> c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    TP* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const TP aik = a(i, k);
      const TB* bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

template <typename TA, typename TX>
std::vector<promote_t<TA, TX>> matvec(const Matrix<TA>& a, std::span<const TX> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: dimensions differ");
  using TP = promote_t<TA, TX>;
  std::vector<TP> y(a.rows(), TP{});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    TP s{};
    const TA* ai = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += ai[j] * x[j];
    y[i] = s;
  }
  return y;
}

template <typename TA, typename TX>
std::vector<promote_t<TA, TX>> matvec(const Matrix<TA>& a, const std::vector<TX>& x) {
  return matvec(a, std::span<const TX>(x));
}

template <typename T>
double frobenius_norm(const Matrix<T>& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += abs2(a(i, j));
  return std::sqrt(s);
}

template <typename T>
double norm2(std::span<const T> v) {
  double s = 0;
  for (const auto& x : v) s += abs2(x);
  return std::sqrt(s);
}
template <typename T>
double norm2(const std::vector<T>& v) { return norm2(std::span<const T>(v)); }

template <typename T>
double max_abs(const Matrix<T>& a) {
  double m = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

template <typename TA, typename TB>
double frobenius_distance(const Matrix<TA>& a, const Matrix<TB>& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += abs2(promote_t<TA, TB>(a(i, j)) - promote_t<TA, TB>(b(i, j)));
  return std::sqrt(s);
}

template <typename T>
std::vector<T> subtract(std::span<const T> a, std::span<const T> b) {
  assert(a.size() == b.size());
  std::vector<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace genpx
