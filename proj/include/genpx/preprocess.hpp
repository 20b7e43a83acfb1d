#pragma once

#include "genpx/lu.hpp"
#include "genpx/multiplier.hpp"
#include "genpx/svd.hpp"

namespace genpx {

struct StageError : NumericFailure {
  std::string stage;
  StageError(std::string st, const std::string& what)
      : NumericFailure("[" + st + "] " + what), stage(std::move(st)) {}
};

struct CoreSingular : NumericFailure {
  explicit CoreSingular(const std::string& what) : NumericFailure(what) {}
};

struct StepSingular : NumericFailure {
  int step;
  explicit StepSingular(int j)
      : NumericFailure("homotopy step " + std::to_string(j) + " produced a singular update"),
        step(j) {}
};

struct SolveOptions {
  // pivot threshold handed to genp_factor inside the pipelines; 0 lets the
  // elimination run through tiny pivots and surfaces the damage as residual
  double pivot_tol = 0.0;
};

struct PipelineDiagnostics {
  std::vector<double> pivot_mags;        // |u_kk| of the pre-processed factorization
  std::vector<double> residual_by_iter;  // entry j = relative residual after j refinements
  long long rv_count = 0;
  std::string note;
};

template <typename T>
struct PipelineResult {
  std::vector<T> x;
  PipelineDiagnostics diag;
};

// Solve A x = b through M = F A H: factor M without pivoting, solve M y = F b,
// map back x = H y, then refine against the original A with the same operator.
template <typename T>
PipelineResult<T> solve_preprocessed(const Matrix<T>& a, std::span<const T> b,
                                     const Multiplier* left, const Multiplier* right,
                                     int refine_iters, const SolveOptions& opt = {}) {
  if (!a.square()) throw DimensionMismatch("solve_preprocessed: matrix not square");
  PipelineResult<T> out;
  out.diag.rv_count = (left ? left->random_variables() : 0) +
                      (right ? right->random_variables() : 0);

  Matrix<T> m = a;
  if (right) {
    if constexpr (is_complex_v<T>)
      m = apply_right_complex(m, *right);
    else
      m = apply_right_real(m, *right);
  }
  if (left) {
    if constexpr (is_complex_v<T>)
      m = apply_left_complex(*left, m);
    else
      m = apply_left_real(*left, m);
  }

  LuFactors<T> lu;
  try {
    lu = genp_factor(m, opt.pivot_tol, &out.diag.pivot_mags);
  } catch (const ZeroPivot& e) {
    throw StageError("factor", e.what());
  }

  const auto solve_once = [&](std::span<const T> rhs) {
    std::vector<T> fb;
    if (left)
      fb = left->apply(rhs);
    else
      fb.assign(rhs.begin(), rhs.end());
    auto y = lu_solve(lu, std::span<const T>(fb));
    if (right) y = right->apply(std::span<const T>(y));
    return y;
  };

  out.x = solve_once(b);
  out.diag.residual_by_iter.push_back(relative_residual(a, std::span<const T>(out.x), b));
  for (int j = 0; j < refine_iters; ++j) {
    auto ax = matvec(a, std::span<const T>(out.x));
    std::vector<T> r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
    const auto d = solve_once(std::span<const T>(r));
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += d[i];
    out.diag.residual_by_iter.push_back(relative_residual(a, std::span<const T>(out.x), b));
  }
  return out;
}

// Two-step block scheme: Gaussian-sandwich only the k x k leading block, factor
// it, then give the (n-k) Schur complement its own Gaussian pre-processing.
PipelineResult<double> solve_block_preprocessed(const RealMatrix& a, std::span<const double> b,
                                                std::size_t k, Rng& rng, int refine_iters = 1,
                                                const SolveOptions& opt = {});

template <typename T>
struct AugmentedSystem {
  std::size_t h = 0;
  Matrix<T> u, v;  // n x h borders
  Matrix<T> k;     // [[I_h, V^T], [U, A]]
};

template <typename T>
AugmentedSystem<T> augment(const Matrix<T>& a, const Matrix<T>& u, const Matrix<T>& v) {
  if (!a.square() || u.rows() != a.rows() || v.rows() != a.rows() || u.cols() != v.cols())
    throw DimensionMismatch("augment: border shapes must be n x h");
  AugmentedSystem<T> s;
  s.h = u.cols();
  s.u = u;
  s.v = v;
  const std::size_t n = a.rows(), h = s.h;
  s.k = Matrix<T>(n + h, n + h);
  for (std::size_t i = 0; i < h; ++i) s.k(i, i) = T{1};
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < n; ++j) s.k(i, h + j) = v(j, i);  // V^T block
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < h; ++j) s.k(h + i, j) = u(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s.k(h + i, h + j) = a(i, j);
  return s;
}

// C = A - U V^T
template <typename T>
Matrix<T> additive(const Matrix<T>& a, const Matrix<T>& u, const Matrix<T>& v) {
  if (!a.square() || u.rows() != a.rows() || v.rows() != a.rows() || u.cols() != v.cols())
    throw DimensionMismatch("additive: border shapes must be n x h");
  Matrix<T> c = a;
  const std::size_t n = a.rows(), h = u.cols();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      T s{};
      for (std::size_t t = 0; t < h; ++t) s += u(i, t) * v(j, t);
      c(i, j) -= s;
    }
  return c;
}

// x = A^{-1} b from a solver for C = A - U V^T plus an h x h correction
template <typename T>
std::vector<T> smw_solve(const std::function<std::vector<T>(std::span<const T>)>& c_solver,
                         const Matrix<T>& u, const Matrix<T>& v, std::span<const T> b) {
  const std::size_t n = u.rows(), h = u.cols();
  if (b.size() != n || v.rows() != n || v.cols() != h)
    throw DimensionMismatch("smw_solve: shapes differ");
  auto z = c_solver(b);
  if (h == 0) return z;

  Matrix<T> w(n, h);  // C^{-1} U
  std::vector<T> col(n);
  for (std::size_t j = 0; j < h; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = u(i, j);
    const auto s = c_solver(std::span<const T>(col));
    for (std::size_t i = 0; i < n; ++i) w(i, j) = s[i];
  }
  Matrix<T> cap = Matrix<T>::identity(h);  // I_h + V^T C^{-1} U
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      T s{};
      for (std::size_t t = 0; t < n; ++t) s += v(t, i) * w(t, j);
      cap(i, j) += s;
    }
  LuFactors<T> caplu;
  try {
    caplu = gepp_factor(cap);
  } catch (const SingularMatrix& e) {
    throw CoreSingular(std::string("smw_solve: capacitance matrix singular: ") + e.what());
  }
  std::vector<T> vtz(h, T{});
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t t = 0; t < n; ++t) vtz[i] += v(t, i) * z[t];
  const auto y = lu_solve(caplu, std::span<const T>(vtz));
  for (std::size_t i = 0; i < n; ++i) {
    T s{};
    for (std::size_t j = 0; j < h; ++j) s += w(i, j) * y[j];
    z[i] -= s;
  }
  return z;
}

struct HomotopySchedule {
  std::vector<double> tau;  // 1 = tau_0 > tau_1 > ... > tau_l = 0

  static HomotopySchedule uniform(int steps) {
    HomotopySchedule s;
    for (int j = 0; j <= steps; ++j) s.tau.push_back(1.0 - double(j) / double(steps));
    s.tau.back() = 0.0;
    return s;
  }

  void validate() const {
    if (tau.size() < 2 || tau.front() != 1.0 || tau.back() != 0.0)
      throw std::invalid_argument("homotopy schedule must run from 1 to 0");
    for (std::size_t i = 1; i < tau.size(); ++i)
      if (!(tau[i] < tau[i - 1]))
        throw std::invalid_argument("homotopy schedule must decrease strictly");
  }
};

// Walk C(tau) = A - tau U V^T from tau = 1 to 0, updating the explicit inverse
// by rank-h corrections. Steps whose h x h system is singular are bisected a
// few times before StepSingular surfaces.
template <typename T>
std::vector<T> homotopy_solve(const Matrix<T>& a, const Matrix<T>& u, const Matrix<T>& v,
                              const HomotopySchedule& schedule, std::span<const T> b) {
  schedule.validate();
  const std::size_t n = a.rows(), h = u.cols();
  Matrix<T> c = additive(a, u, v);
  LuFactors<T> lu;
  try {
    lu = genp_factor(c);
  } catch (const ZeroPivot& e) {
    throw StageError("additive factor", e.what());
  }
  Matrix<T> cinv = lu_solve_matrix(lu, Matrix<T>::identity(n));

  const std::function<void(double, double, int, int)> step = [&](double ta, double tb, int depth,
                                                                 int index) {
    const double delta = tb - ta;
    // S = I_h - delta V^T Cinv U  (so that Cinv' = Cinv + delta Cinv U S^{-1} V^T Cinv)
    Matrix<T> cu(n, h);
    {
      std::vector<T> col(n), res;
      for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = u(i, j);
        res = matvec(cinv, std::span<const T>(col));
        for (std::size_t i = 0; i < n; ++i) cu(i, j) = res[i];
      }
    }
    Matrix<T> s = Matrix<T>::identity(h);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < h; ++j) {
        T acc{};
        for (std::size_t t = 0; t < n; ++t) acc += v(t, i) * cu(t, j);
        s(i, j) -= T{delta} * acc;
      }
    LuFactors<T> slu;
    try {
      slu = gepp_factor(s);
    } catch (const SingularMatrix&) {
      if (depth >= 4) throw StepSingular(index);
      const double mid = 0.5 * (ta + tb);
      step(ta, mid, depth + 1, index);
      step(mid, tb, depth + 1, index);
      return;
    }
    // Cinv += delta * CU * S^{-1} * (V^T Cinv)
    Matrix<T> vtc(h, n);
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        T acc{};
        for (std::size_t t = 0; t < n; ++t) acc += v(t, i) * cinv(t, j);
        vtc(i, j) = acc;
      }
    const Matrix<T> sinv_vtc = lu_solve_matrix(slu, vtc);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        T acc{};
        for (std::size_t t = 0; t < h; ++t) acc += cu(i, t) * sinv_vtc(t, j);
        cinv(i, j) += T{delta} * acc;
      }
  };

  for (std::size_t j = 0; j + 1 < schedule.tau.size(); ++j)
    step(schedule.tau[j], schedule.tau[j + 1], 0, int(j));
  return matvec(cinv, b);
}

enum class BorderKind { gaussian, srft, circulant };

// Additive pre-processing end to end: draw borders, scale them so that
// ||A|| = ratio * ||U V^T||, factor C = A - U V^T without pivoting, recover
// through SMW, refine against A.
template <typename T>
PipelineResult<T> augmented_solve(const Matrix<T>& a, std::span<const T> b, std::size_t h,
                                  BorderKind kind, Rng& rng, int refine_iters,
                                  double ratio = 2.0, const SolveOptions& opt = {});

// border drawing shared with the tests
RealMatrix draw_border_real(std::size_t n, std::size_t h, BorderKind kind, Rng& rng);
ComplexMatrix draw_border_complex(std::size_t n, std::size_t h, BorderKind kind, Rng& rng);

// largest singular value of U V^T through thin QR of both factors
template <typename T>
double lowrank_spectral_norm(const Matrix<T>& u, const Matrix<T>& v);

namespace detail {

// modified Gram-Schmidt R factor (h x h) of an n x h matrix
template <typename T>
Matrix<T> mgs_r(Matrix<T> w) {
  const std::size_t n = w.rows(), h = w.cols();
  Matrix<T> r(h, h);
  for (std::size_t j = 0; j < h; ++j) {
    double nrm2 = 0;
    for (std::size_t i = 0; i < n; ++i) nrm2 += abs2(w(i, j));
    const double nrm = std::sqrt(nrm2);
    r(j, j) = nrm;
    if (nrm == 0) continue;
    for (std::size_t i = 0; i < n; ++i) w(i, j) /= nrm;
    for (std::size_t t = j + 1; t < h; ++t) {
      T dot{};
      for (std::size_t i = 0; i < n; ++i) {
        if constexpr (is_complex_v<T>)
          dot += std::conj(w(i, j)) * w(i, t);
        else
          dot += w(i, j) * w(i, t);
      }
      r(j, t) = dot;
      for (std::size_t i = 0; i < n; ++i) w(i, t) -= dot * w(i, j);
    }
  }
  return r;
}

}  // namespace detail

template <typename T>
double lowrank_spectral_norm(const Matrix<T>& u, const Matrix<T>& v) {
  const auto ru = detail::mgs_r(u);
  const auto rv = detail::mgs_r(v);
  // U V^T = Qu (Ru Rv^T)^ Qv^T up to unitary factors
  const auto s = singular_values(matmul(ru, rv.transposed()));
  return s.empty() ? 0.0 : s.front();
}

template <typename T>
PipelineResult<T> augmented_solve(const Matrix<T>& a, std::span<const T> b, std::size_t h,
                                  BorderKind kind, Rng& rng, int refine_iters, double ratio,
                                  const SolveOptions& opt) {
  if (!a.square()) throw DimensionMismatch("augmented_solve: matrix not square");
  const std::size_t n = a.rows();
  if (h > n) throw BadSize("augmented_solve: border wider than the matrix");

  PipelineResult<T> out;
  if (h == 0) {
    // no border: plain GENP on A
    auto plain = solve_preprocessed<T>(a, b, nullptr, nullptr, refine_iters, opt);
    return plain;
  }
  Matrix<T> u, v;
  if constexpr (is_complex_v<T>) {
    u = draw_border_complex(n, h, kind, rng);
    v = draw_border_complex(n, h, kind, rng);
  } else {
    if (kind == BorderKind::srft)
      throw std::logic_error("srft borders need the complex pipeline");
    u = draw_border_real(n, h, kind, rng);
    v = draw_border_real(n, h, kind, rng);
  }
  switch (kind) {
    case BorderKind::gaussian: out.diag.rv_count = 2LL * (long long)(n * h); break;
    case BorderKind::circulant: out.diag.rv_count = 2LL * (long long)n; break;
    case BorderKind::srft: out.diag.rv_count = 2LL * (long long)(n + h); break;
  }

  const double na = spectral_norm(a);
  const double nuv = lowrank_spectral_norm(u, v);
  if (nuv > 0) {
    const double c = std::sqrt(na / (ratio * nuv));
    u *= T{c};
    v *= T{c};
  }

  Matrix<T> cmat = additive(a, u, v);
  LuFactors<T> lu;
  try {
    lu = genp_factor(cmat, opt.pivot_tol, &out.diag.pivot_mags);
  } catch (const ZeroPivot& e) {
    throw StageError("additive factor", e.what());
  }
  const auto c_solver = [&](std::span<const T> rhs) { return lu_solve(lu, rhs); };
  const auto solve_once = [&](std::span<const T> rhs) {
    return smw_solve<T>(c_solver, u, v, rhs);
  };

  try {
    out.x = solve_once(b);
  } catch (const CoreSingular& e) {
    throw StageError("smw recovery", e.what());
  }
  out.diag.residual_by_iter.push_back(relative_residual(a, std::span<const T>(out.x), b));
  for (int j = 0; j < refine_iters; ++j) {
    auto ax = matvec(a, std::span<const T>(out.x));
    std::vector<T> r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
    const auto d = solve_once(std::span<const T>(r));
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += d[i];
    out.diag.residual_by_iter.push_back(relative_residual(a, std::span<const T>(out.x), b));
  }
  return out;
}

}  // namespace genpx
