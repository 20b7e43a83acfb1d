#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "genpx/matrix.hpp"
#include "genpx/svd.hpp"

namespace genpx {

struct NumericFailure : std::runtime_error {
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroPivot : NumericFailure {
  int step;  // 1-based elimination step
  explicit ZeroPivot(int k)
      : NumericFailure("zero pivot at elimination step " + std::to_string(k)), step(k) {}
};

struct SingularMatrix : NumericFailure {
  explicit SingularMatrix(const std::string& what) : NumericFailure(what) {}
};

struct SingularPivotBlock : NumericFailure {
  explicit SingularPivotBlock(const std::string& what) : NumericFailure(what) {}
};

struct ZeroPivotBlock : NumericFailure {
  int stage;  // 1-based elimination stage
  explicit ZeroPivotBlock(int s)
      : NumericFailure("singular pivot block at stage " + std::to_string(s)), stage(s) {}
};

struct ZeroRhs : NumericFailure {
  ZeroRhs() : NumericFailure("right-hand side has zero norm") {}
};

template <typename T>
struct LuFactors {
  std::size_t n = 0;
  Matrix<T> lower;  // unit lower triangular
  Matrix<T> upper;  // upper triangular
  std::optional<std::vector<int>> permutation;  // row map; present for GEPP only

  std::vector<T> diagonal_pivots() const {
    std::vector<T> p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = upper(k, k);
    return p;
  }
};

namespace detail {

template <typename T>
inline constexpr bool is_float_scalar_v = std::is_floating_point_v<T> || is_complex_v<T>;

// elimination in place; the strictly lower part of `a` receives the factors
template <typename T>
void split_packed(const Matrix<T>& a, LuFactors<T>& f) {
  const std::size_t n = a.rows();
  f.n = n;
  f.lower = Matrix<T>(n, n);
  f.upper = Matrix<T>(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) f.lower(i, j) = a(i, j);
    f.lower(i, i) = T{1};
    for (std::size_t j = i; j < n; ++j) f.upper(i, j) = a(i, j);
  }
}

template <typename T>
bool pivot_is_zero(const T& p, double threshold) {
  if constexpr (is_float_scalar_v<T>) {
    if (threshold > 0.0) return std::abs(p) <= threshold;
  }
  return p == T{};
}

}  // namespace detail

// Gaussian elimination with no pivoting. pivot_tol is relative to ||A||_F;
// the default is n*eps. pivot_tol = 0 fails only on an exact zero pivot.
template <typename T>
LuFactors<T> genp_factor(const Matrix<T>& a,
                         std::optional<double> pivot_tol = std::nullopt,
                         std::vector<double>* pivot_mags = nullptr) {
  if (!a.square()) throw DimensionMismatch("genp_factor: matrix not square");
  const std::size_t n = a.rows();
  double tol = pivot_tol.value_or(double(n) * std::numeric_limits<double>::epsilon());
  if (tol < 0) throw std::invalid_argument("genp_factor: pivot_tol must be nonnegative");
  double threshold = 0.0;
  if (tol > 0) {
    if constexpr (detail::is_float_scalar_v<T>)
      threshold = tol * frobenius_norm(a);
    else
      throw std::invalid_argument("genp_factor: nonzero pivot_tol needs floating-point scalars");
  }

  Matrix<T> w = a;
  if (pivot_mags) pivot_mags->assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const T piv = w(k, k);
    if (pivot_mags) {
      if constexpr (detail::is_float_scalar_v<T>) (*pivot_mags)[k] = std::abs(piv);
    }
    if (detail::pivot_is_zero(piv, threshold)) throw ZeroPivot(int(k) + 1);
    if (k + 1 == n) break;
    const T* rk = w.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      T* ri = w.row(i);
      const T l = ri[k] / piv;
      ri[k] = l;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  LuFactors<T> f;
  detail::split_packed(w, f);
  return f;
}

// Gaussian elimination with partial pivoting, row-swap baseline.
template <typename T>
LuFactors<T> gepp_factor(const Matrix<T>& a) {
  if (!a.square()) throw DimensionMismatch("gepp_factor: matrix not square");
  const std::size_t n = a.rows();
  const double threshold = std::numeric_limits<double>::epsilon() * frobenius_norm(a);

  Matrix<T> w = a;
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = int(i);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    double best_mag = std::abs(w(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(w(i, k));
      if (m > best_mag) { best_mag = m; best = i; }
    }
    if (best_mag <= threshold)
      throw SingularMatrix("gepp_factor: no acceptable pivot at step " + std::to_string(k + 1));
    if (best != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(k, j), w(best, j));
      std::swap(perm[k], perm[best]);
    }
    if (k + 1 == n) break;
    const T piv = w(k, k);
    const T* rk = w.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      T* ri = w.row(i);
      const T l = ri[k] / piv;
      ri[k] = l;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= l * rk[j];
    }
  }
  LuFactors<T> f;
  detail::split_packed(w, f);
  f.permutation = std::move(perm);
  return f;
}

// forward/back substitution for P A x = L U x' with x' = P b
template <typename T, typename TB>
std::vector<promote_t<T, TB>> lu_solve(const LuFactors<T>& f, std::span<const TB> b) {
  using TP = promote_t<T, TB>;
  const std::size_t n = f.n;
  if (b.size() != n) throw DimensionMismatch("lu_solve: rhs length differs from factor size");
  std::vector<TP> x(n);
  if (f.permutation) {
    const auto& p = *f.permutation;
    for (std::size_t i = 0; i < n; ++i) x[i] = b[std::size_t(p[i])];
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    TP s = x[i];
    const T* li = f.lower.row(i);
    for (std::size_t j = 0; j < i; ++j) s -= li[j] * x[j];
    x[i] = s;
  }
  for (std::size_t ii = n; ii > 0; --ii) {
    const std::size_t i = ii - 1;
    TP s = x[i];
    const T* ui = f.upper.row(i);
    for (std::size_t j = i + 1; j < n; ++j) s -= ui[j] * x[j];
    x[i] = s / ui[i];
  }
  return x;
}

template <typename T, typename TB>
std::vector<promote_t<T, TB>> lu_solve(const LuFactors<T>& f, const std::vector<TB>& b) {
  return lu_solve(f, std::span<const TB>(b));
}

// X = B^{-1} C, one column at a time
template <typename T>
Matrix<T> lu_solve_matrix(const LuFactors<T>& f, const Matrix<T>& c) {
  Matrix<T> x(c.rows(), c.cols());
  std::vector<T> col(c.rows());
  for (std::size_t j = 0; j < c.cols(); ++j) {
    for (std::size_t i = 0; i < c.rows(); ++i) col[i] = c(i, j);
    auto sol = lu_solve(f, std::span<const T>(col));
    for (std::size_t i = 0; i < c.rows(); ++i) x(i, j) = sol[i];
  }
  return x;
}

// Y = D B^{-1}  via  B^T Y^T = D^T (transpose substitution on the factors)
template <typename T>
Matrix<T> lu_solve_right(const LuFactors<T>& f, const Matrix<T>& d) {
  const std::size_t n = f.n;
  if (d.cols() != n) throw DimensionMismatch("lu_solve_right: dimensions differ");
  Matrix<T> y(d.rows(), n);
  std::vector<T> x(n);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t i = 0; i < n; ++i) x[i] = d(r, i);
    // solve U^T z = x (forward), then L^T w = z (backward); y_r = w P
    for (std::size_t i = 0; i < n; ++i) {
      T s = x[i];
      for (std::size_t j = 0; j < i; ++j) s -= f.upper(j, i) * x[j];
      x[i] = s / f.upper(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      T s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= f.lower(j, i) * x[j];
      x[i] = s;
    }
    if (f.permutation) {
      const auto& p = *f.permutation;
      for (std::size_t i = 0; i < n; ++i) y(r, std::size_t(p[i])) = x[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) y(r, i) = x[i];
    }
  }
  return y;
}

// S = E - D B^{-1} C for the leading k x k pivot block B
template <typename T>
Matrix<T> schur_complement(const Matrix<T>& a, std::size_t k) {
  if (!a.square()) throw DimensionMismatch("schur_complement: matrix not square");
  const std::size_t n = a.rows();
  if (k < 1 || k >= n) throw std::invalid_argument("schur_complement: need 1 <= k < n");
  LuFactors<T> f;
  try {
    f = genp_factor(a.block(0, 0, k, k));
  } catch (const ZeroPivot&) {
    throw SingularPivotBlock("schur_complement: leading block of order " + std::to_string(k) +
                             " is numerically singular");
  }
  const Matrix<T> c = a.block(0, k, k, n - k);
  const Matrix<T> d = a.block(k, 0, n - k, k);
  Matrix<T> s = a.block(k, k, n - k, n - k);
  s -= matmul(d, lu_solve_matrix(f, c));
  return s;
}

template <typename T>
struct BgeStage {
  std::size_t pivot_size = 0;
  LuFactors<T> block;     // factorization of the stage pivot block B
  Matrix<T> d_binv;       // D B^{-1}
  Matrix<T> binv_c;       // B^{-1} C
};

// Block Gaussian elimination: a sequence of pivot blocks and their
// elimination factors, plus the final Schur complement chain.
template <typename T>
struct BgeFactorization {
  std::size_t n = 0;
  std::vector<BgeStage<T>> stages;

  // rebuild the input matrix from the recorded stages
  Matrix<T> recompose() const {
    Matrix<T> s(0, 0);
    for (std::size_t si = stages.size(); si > 0; --si) {
      const auto& st = stages[si - 1];
      const std::size_t k = st.pivot_size, r = s.rows();
      Matrix<T> b = matmul(st.block.lower, st.block.upper);
      Matrix<T> m(k + r, k + r);
      m.set_block(0, 0, b);
      if (r > 0) {
        Matrix<T> c = matmul(b, st.binv_c);
        Matrix<T> d = matmul(st.d_binv, b);
        m.set_block(0, k, c);
        m.set_block(k, 0, d);
        Matrix<T> e = matmul(st.d_binv, c);
        e += s;
        m.set_block(k, k, e);
      }
      s = std::move(m);
    }
    return s;
  }
};

template <typename T>
BgeFactorization<T> bge_factor(const Matrix<T>& a, const std::vector<std::size_t>& block_sizes,
                               std::optional<double> pivot_tol = std::nullopt) {
  if (!a.square()) throw DimensionMismatch("bge_factor: matrix not square");
  std::size_t total = 0;
  for (auto k : block_sizes) total += k;
  if (total != a.rows() || block_sizes.empty())
    throw std::invalid_argument("bge_factor: block sizes must sum to n");

  BgeFactorization<T> out;
  out.n = a.rows();
  Matrix<T> cur = a;
  for (std::size_t si = 0; si < block_sizes.size(); ++si) {
    const std::size_t k = block_sizes[si];
    const std::size_t r = cur.rows() - k;
    BgeStage<T> st;
    st.pivot_size = k;
    try {
      st.block = genp_factor(cur.block(0, 0, k, k), pivot_tol);
    } catch (const ZeroPivot&) {
      throw ZeroPivotBlock(int(si) + 1);
    }
    if (r > 0) {
      const Matrix<T> c = cur.block(0, k, k, r);
      const Matrix<T> d = cur.block(k, 0, r, k);
      st.binv_c = lu_solve_matrix(st.block, c);
      st.d_binv = lu_solve_right(st.block, d);
      Matrix<T> s = cur.block(k, k, r, r);
      s -= matmul(st.d_binv, c);
      out.stages.push_back(std::move(st));
      cur = std::move(s);
    } else {
      st.binv_c = Matrix<T>(k, 0);
      st.d_binv = Matrix<T>(0, k);
      out.stages.push_back(std::move(st));
      cur = Matrix<T>(0, 0);
    }
  }
  return out;
}

struct SafetyReport {
  std::size_t n = 0;
  std::vector<double> leading_block_kappa;  // kappa(A_{k,k}) for k = 1..n
  double smallest_pivot = 0;                // from a GENP pass, 0 if a pivot vanished
  bool strongly_nonsingular = false;
  bool strongly_well_conditioned = false;
};

template <typename T>
SafetyReport safety_report(const Matrix<T>& a, double kappa_threshold) {
  if (!a.square()) throw DimensionMismatch("safety_report: matrix not square");
  if (!(kappa_threshold > 1.0))
    throw std::invalid_argument("safety_report: kappa threshold must exceed 1");
  SafetyReport r;
  r.n = a.rows();
  r.leading_block_kappa.resize(r.n);
  for (std::size_t k = 1; k <= r.n; ++k)
    r.leading_block_kappa[k - 1] = condition_number(a.block(0, 0, k, k));
  r.strongly_nonsingular = true;
  r.strongly_well_conditioned = true;
  for (double kap : r.leading_block_kappa) {
    if (!std::isfinite(kap)) r.strongly_nonsingular = false;
    if (!(kap <= kappa_threshold)) r.strongly_well_conditioned = false;
  }
  if (!r.strongly_nonsingular) r.strongly_well_conditioned = false;

  std::vector<double> pivots;
  try {
    genp_factor(a, 0.0, &pivots);
    r.smallest_pivot = *std::min_element(pivots.begin(), pivots.end());
  } catch (const ZeroPivot&) {
    r.smallest_pivot = 0.0;
  }
  return r;
}

template <typename TA, typename TX, typename TB>
double relative_residual(const Matrix<TA>& a, std::span<const TX> x, std::span<const TB> b) {
  if (a.cols() != x.size() || a.rows() != b.size())
    throw DimensionMismatch("relative_residual: dimensions differ");
  const double nb = norm2(b);
  if (nb == 0.0) throw ZeroRhs();
  using TP = promote_t<promote_t<TA, TX>, TB>;
  auto ax = matvec(a, x);
  double s = 0;
  for (std::size_t i = 0; i < b.size(); ++i) s += abs2(TP(ax[i]) - TP(b[i]));
  return std::sqrt(s) / nb;
}

template <typename TA, typename TX, typename TB>
double relative_residual(const Matrix<TA>& a, const std::vector<TX>& x, const std::vector<TB>& b) {
  return relative_residual(a, std::span<const TX>(x), std::span<const TB>(b));
}

// x_{j+1} = x_j + solve(b - A x_j); residuals accumulate in working precision
template <typename T>
std::vector<T> iterative_refine(const Matrix<T>& a,
                                const std::function<std::vector<T>(std::span<const T>)>& solve,
                                std::span<const T> b, int iters) {
  if (iters < 0) throw std::invalid_argument("iterative_refine: negative iteration count");
  std::vector<T> x = solve(b);
  for (int j = 0; j < iters; ++j) {
    auto ax = matvec(a, std::span<const T>(x));
    std::vector<T> r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
    auto d = solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += d[i];
  }
  return x;
}

}  // namespace genpx
