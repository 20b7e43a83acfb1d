#pragma once

#include <algorithm>
#include <functional>
#include <limits>

#include "genpx/matrix.hpp"

namespace genpx {

// Singular values by one-sided Jacobi on columns. Works on the columns
// directly (no Gram matrix), so tiny singular values keep relative accuracy.
template <typename T>
std::vector<double> singular_values(Matrix<T> a, int max_sweeps = 40) {
  if (a.rows() < a.cols()) a = a.conj_transposed();
  const std::size_t m = a.rows(), n = a.cols();
  // column-major copy for contiguous column access
  std::vector<T> col(m * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) col[j * m + i] = a(i, j);

  const double tol = 1e-15;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        T* cp = col.data() + p * m;
        T* cq = col.data() + q * m;
        double app = 0, aqq = 0;
        T apq{};
        for (std::size_t i = 0; i < m; ++i) {
          app += abs2(cp[i]);
          aqq += abs2(cq[i]);
          if constexpr (is_complex_v<T>)
            apq += std::conj(cp[i]) * cq[i];
          else
            apq += cp[i] * cq[i];
        }
        const double g = std::abs(apq);
        if (g <= tol * std::sqrt(app * aqq) || g == 0.0) continue;
        rotated = true;
        // de-phase so the pair problem is real, then classic Jacobi angle
        T phase;
        if constexpr (is_complex_v<T>)
          phase = apq / g;
        else
          phase = apq > 0 ? 1.0 : -1.0;
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const T vp = cp[i];
          const T vq = cq[i] * (T{1} / phase);
          cp[i] = c * vp - s * vq;
          cq[i] = (s * vp + c * vq) * phase;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += abs2(col[j * m + i]);
    sigma[j] = std::sqrt(s);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return sigma;
}

// eigenvalues of a symmetric real matrix by cyclic Jacobi, ascending
inline std::vector<double> symmetric_eigenvalues(RealMatrix a, int max_sweeps = 50) {
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * frobenius_norm(a) * frobenius_norm(a)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - s * aqj;
          a(q, j) = s * apj + c * aqj;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

template <typename T>
double condition_number(const Matrix<T>& a) {
  const auto s = singular_values(a);
  if (s.empty()) return 1.0;
  if (s.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

// Largest singular value estimated through power iteration on A^H A, with a
// deterministic start vector. apply/apply_adjoint operate in place.
inline double spectral_norm_power(
    std::size_t rows, std::size_t cols,
    const std::function<void(std::vector<cplx>&)>& apply,
    const std::function<void(std::vector<cplx>&)>& apply_adjoint,
    double rel_tol = 1e-8, int max_iters = 400) {
  (void)rows;
  std::vector<cplx> v(cols);
  for (std::size_t i = 0; i < cols; ++i) v[i] = 1.0 + 0.25 * std::cos(double(i + 1));
  double nv = norm2(std::span<const cplx>(v));
  if (nv == 0.0) return 0.0;
  for (auto& x : v) x /= nv;
  double sigma = 0;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<cplx> w = v;
    apply(w);          // w = A v        (length rows on return)
    apply_adjoint(w);  // w = A^H A v    (length cols on return)
    const double lambda = norm2(std::span<const cplx>(w));  // ~ sigma^2
    if (lambda == 0.0) return 0.0;
    for (auto& x : w) x /= lambda;
    const double est = std::sqrt(lambda);
    const double change = std::abs(est - sigma);
    sigma = est;
    v = std::move(w);
    if (it > 2 && change <= rel_tol * sigma) break;
  }
  return sigma;
}

template <typename T>
double spectral_norm(const Matrix<T>& a, double rel_tol = 1e-8) {
  if (std::min(a.rows(), a.cols()) <= 12) {
    const auto s = singular_values(a);
    return s.empty() ? 0.0 : s.front();
  }
  return spectral_norm_power(
      a.rows(), a.cols(),
      [&](std::vector<cplx>& v) {
        std::vector<cplx> y(a.rows(), cplx{});
        for (std::size_t i = 0; i < a.rows(); ++i) {
          cplx s{};
          const T* ai = a.row(i);
          for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * v[j];
          y[i] = s;
        }
        v = std::move(y);
      },
      [&](std::vector<cplx>& v) {
        std::vector<cplx> y(a.cols(), cplx{});
        for (std::size_t i = 0; i < a.rows(); ++i) {
          const T* ai = a.row(i);
          for (std::size_t j = 0; j < a.cols(); ++j) {
            if constexpr (is_complex_v<T>)
              y[j] += std::conj(ai[j]) * v[i];
            else
              y[j] += ai[j] * v[i];
          }
        }
        v = std::move(y);
      },
      rel_tol);
}

}  // namespace genpx
