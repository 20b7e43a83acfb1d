#include "genpx/preprocess.hpp"

namespace genpx {

RealMatrix draw_border_real(std::size_t n, std::size_t h, BorderKind kind, Rng& rng) {
  RealMatrix u(n, h);
  switch (kind) {
    case BorderKind::gaussian:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < h; ++j) u(i, j) = rng.gaussian();
      return u;
    case BorderKind::circulant: {
      // leading h columns of the circulant defined by a Gaussian first column
      const auto v = rng.gaussian_vector(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < h; ++j) u(i, j) = v[(i + n - j) % n];
      return u;
    }
    case BorderKind::srft:
      throw std::logic_error("srft borders are complex-valued");
  }
  return u;
}

ComplexMatrix draw_border_complex(std::size_t n, std::size_t h, BorderKind kind, Rng& rng) {
  if (kind == BorderKind::srft) return srft(n, h, rng).materialize_complex();
  return promote(draw_border_real(n, h, kind, rng));
}

PipelineResult<double> solve_block_preprocessed(const RealMatrix& a, std::span<const double> b,
                                                std::size_t k, Rng& rng, int refine_iters,
                                                const SolveOptions& opt) {
  if (!a.square()) throw DimensionMismatch("solve_block_preprocessed: matrix not square");
  const std::size_t n = a.rows();
  if (k < 1 || k > n) throw BadSize("solve_block_preprocessed: need 1 <= k <= n");

  PipelineResult<double> out;

  auto gaussian_matrix = [&](std::size_t r, std::size_t c) {
    RealMatrix g(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g(i, j) = rng.gaussian();
    return g;
  };

  if (k == n) {
    // degenerate one-step scheme: plain two-sided Gaussian pre-processing
    const Multiplier f = make_gaussian(n, rng);
    const Multiplier h = make_gaussian(n, rng);
    return solve_preprocessed<double>(a, b, &f, &h, refine_iters, opt);
  }

  const std::size_t r = n - k;
  const RealMatrix f1 = gaussian_matrix(k, n);   // left n x k multiplier, transposed
  const RealMatrix h1 = gaussian_matrix(n, k);   // right n x k multiplier
  out.diag.rv_count = 2 * (long long)(n * k);

  // M = [[F1 A H1, F1 A E], [E^T A H1, E^T A E]] with E = trailing columns
  const RealMatrix f1a = matmul(f1, a);          // k x n
  const RealMatrix m11 = matmul(f1a, h1);        // k x k
  const RealMatrix m12 = f1a.block(0, k, k, r);  // k x r
  const RealMatrix a2 = a.block(k, 0, r, n);
  const RealMatrix m21 = matmul(a2, h1);         // r x k
  const RealMatrix m22 = a.block(k, k, r, r);

  LuFactors<double> lu1;
  try {
    lu1 = genp_factor(m11, opt.pivot_tol, &out.diag.pivot_mags);
  } catch (const ZeroPivot& e) {
    throw StageError("leading block factor", e.what());
  }

  // Schur complement of the pre-processed block
  RealMatrix s = m22;
  s -= matmul(m21, lu_solve_matrix(lu1, m12));

  // second step: full Gaussian pre-processing of the Schur complement
  const Multiplier f2 = make_gaussian(r, rng);
  const Multiplier h2 = make_gaussian(r, rng);
  out.diag.rv_count += f2.random_variables() + h2.random_variables();

  const RealMatrix m2 = apply_left_real(f2, apply_right_real(s, h2));
  LuFactors<double> lu2;
  std::vector<double> pivots2;
  try {
    lu2 = genp_factor(m2, opt.pivot_tol, &pivots2);
  } catch (const ZeroPivot& e) {
    throw StageError("schur factor", e.what());
  }
  out.diag.pivot_mags.insert(out.diag.pivot_mags.end(), pivots2.begin(), pivots2.end());

  const auto schur_solve = [&](std::span<const double> rhs) {
    const auto fb = f2.apply(rhs);
    const auto y = lu_solve(lu2, std::span<const double>(fb));
    return h2.apply(std::span<const double>(y));
  };

  const auto solve_once = [&](std::span<const double> rhs) {
    // c = (F1 rhs ; rhs_tail); block substitution through M
    const auto c1 = matvec(f1, rhs);
    std::vector<double> c2(rhs.begin() + long(k), rhs.end());
    const auto t = lu_solve(lu1, std::span<const double>(c1));
    auto rhs2 = c2;
    {
      const auto m21t = matvec(m21, std::span<const double>(t));
      for (std::size_t i = 0; i < r; ++i) rhs2[i] -= m21t[i];
    }
    const auto z2 = schur_solve(std::span<const double>(rhs2));
    std::vector<double> c1b = c1;
    {
      const auto m12z = matvec(m12, std::span<const double>(z2));
      for (std::size_t i = 0; i < k; ++i) c1b[i] -= m12z[i];
    }
    const auto z1 = lu_solve(lu1, std::span<const double>(c1b));
    auto x = matvec(h1, std::span<const double>(z1));
    for (std::size_t i = 0; i < r; ++i) x[k + i] += z2[i];
    return x;
  };

  out.x = solve_once(b);
  out.diag.residual_by_iter.push_back(relative_residual(a, std::span<const double>(out.x), b));
  for (int j = 0; j < refine_iters; ++j) {
    const auto ax = matvec(a, std::span<const double>(out.x));
    std::vector<double> res(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) res[i] = b[i] - ax[i];
    const auto d = solve_once(std::span<const double>(res));
    for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += d[i];
    out.diag.residual_by_iter.push_back(relative_residual(a, std::span<const double>(out.x), b));
  }
  return out;
}

}  // namespace genpx
