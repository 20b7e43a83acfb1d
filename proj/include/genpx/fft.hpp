#pragma once

#include <bit>
#include <numbers>

#include "genpx/matrix.hpp"

namespace genpx {

// DFT matrix (omega^{ij}) with omega = exp(2*pi*i/n); (1/sqrt n) Omega is unitary.
inline ComplexMatrix dft_matrix(std::size_t n) {
  if (n < 1) throw std::invalid_argument("dft_matrix: n must be positive");
  std::vector<cplx> root(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * double(k) / double(n);
    root[k] = cplx(std::cos(a), std::sin(a));
  }
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = root[(i * j) % n];
  return m;
}

enum class FftDirection { forward, inverse };

namespace detail {

inline void fft_pow2(std::vector<cplx>& v) {
  const std::size_t n = v.size();
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / double(len);
    const std::size_t half = len >> 1;
    std::vector<cplx> w(half);
    for (std::size_t k = 0; k < half; ++k) w[k] = cplx(std::cos(ang * double(k)), std::sin(ang * double(k)));
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const cplx u = v[i + k];
        const cplx t = w[k] * v[i + k + half];
        v[i + k] = u + t;
        v[i + k + half] = u - t;
      }
    }
  }
}

}  // namespace detail

// y = Omega v (forward) or Omega^{-1} v (inverse). Power-of-two lengths run
// through the radix-2 kernel; anything else takes the naive O(n^2) product.
inline std::vector<cplx> fft_apply(std::span<const cplx> v, FftDirection dir) {
  const std::size_t n = v.size();
  if (n == 0) return {};
  std::vector<cplx> y(v.begin(), v.end());
  if (std::has_single_bit(n)) {
    if (dir == FftDirection::inverse)
      for (auto& x : y) x = std::conj(x);
    detail::fft_pow2(y);
    if (dir == FftDirection::inverse)
      for (auto& x : y) x = std::conj(x) / double(n);
    return y;
  }
  const ComplexMatrix om = dft_matrix(n);
  std::vector<cplx> out(n, cplx{});
  if (dir == FftDirection::forward) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < n; ++j) s += om(i, j) * y[j];
      out[i] = s;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = 0; j < n; ++j) s += std::conj(om(j, i)) * y[j];
      out[i] = s / double(n);
    }
  }
  return out;
}

inline std::vector<cplx> fft_apply(const std::vector<cplx>& v, FftDirection dir) {
  return fft_apply(std::span<const cplx>(v), dir);
}

inline std::vector<cplx> to_complex(std::span<const double> v) {
  return std::vector<cplx>(v.begin(), v.end());
}

}  // namespace genpx
