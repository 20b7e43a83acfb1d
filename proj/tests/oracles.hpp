#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately naive (cofactor expansions, O(n^2) transforms, exact
// rationals) and shares no code with the library paths it checks.

#include <cstdint>
#include <numeric>

#include "genpx/matrix.hpp"
#include "genpx/rng.hpp"

namespace genpx::oracle {

// determinant by cofactor expansion along the first row; n <= ~8 only
template <typename T>
T cofactor_det(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0);
  T det{};
  for (std::size_t j = 0; j < n; ++j) {
    Matrix<T> minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(i - 1, cc++) = a(i, c);
      }
    }
    const T term = a(0, j) * cofactor_det(minor);
    if (j % 2 == 0)
      det += term;
    else
      det -= term;
  }
  return det;
}

// exact rational scalar for the safety-equivalence checks
struct Fraction {
  std::int64_t num = 0, den = 1;

  Fraction() = default;
  Fraction(std::int64_t n) : num(n), den(1) {}
  Fraction(int n) : num(n), den(1) {}
  Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) { num = -num; den = -den; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }

  friend Fraction operator+(Fraction a, Fraction b) { return Fraction(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Fraction operator-(Fraction a, Fraction b) { return Fraction(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Fraction operator*(Fraction a, Fraction b) { return Fraction(a.num * b.num, a.den * b.den); }
  friend Fraction operator/(Fraction a, Fraction b) { return Fraction(a.num * b.den, a.den * b.num); }
  Fraction& operator+=(const Fraction& o) { return *this = *this + o; }
  Fraction& operator-=(const Fraction& o) { return *this = *this - o; }
  Fraction& operator*=(const Fraction& o) { return *this = *this * o; }
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num == b.num && a.den == b.den; }
};

inline Matrix<Fraction> to_fractions(const RealMatrix& a) {
  Matrix<Fraction> f(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) f(i, j) = Fraction(std::int64_t(a(i, j)));
  return f;
}

// dense f-circulant built column shift by column shift: Z_f(v) = sum v_i Z_f^i
inline ComplexMatrix dense_f_circulant(const std::vector<cplx>& v, cplx f) {
  const std::size_t n = v.size();
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i >= j) ? v[i - j] : f * v[n + i - j];
  return m;
}

inline RealMatrix dense_circulant_real(const std::vector<double>& v) {
  const std::size_t n = v.size();
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (i >= j) ? v[i - j] : v[n + i - j];
  return m;
}

// O(n^2) DFT, zero-based omega^{ij} with omega = exp(2 pi i / n)
inline std::vector<cplx> naive_dft(const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  std::vector<cplx> y(n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = 2.0 * 3.14159265358979323846 * double((i * j) % n) / double(n);
      y[i] += cplx(std::cos(a), std::sin(a)) * v[j];
    }
  }
  return y;
}

struct Welford {
  long long count = 0;
  double mean = 0, m2 = 0, mn = 0, mx = 0;
  void add(double x) {
    if (count == 0) { mn = mx = x; }
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    ++count;
    const double d = x - mean;
    mean += d / double(count);
    m2 += d * (x - mean);
  }
  double stddev() const { return count > 1 ? std::sqrt(m2 / double(count - 1)) : 0.0; }
};

template <typename T>
std::size_t nnz(const Matrix<T>& m, double tol = 1e-12) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol) ++c;
  return c;
}

inline RealMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  RealMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.gaussian();
  return m;
}

inline ComplexMatrix random_complex_matrix(std::size_t r, std::size_t c, Rng& rng) {
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = cplx(rng.gaussian(), rng.gaussian());
  return m;
}

}  // namespace genpx::oracle
