#include "genpx/multiplier.hpp"

#include <functional>
#include <numbers>

namespace genpx {

namespace {

void require_pow2(std::size_t n, const char* who) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw BadSize(std::string(who) + ": size must be a power of two");
}

int log2_size(std::size_t n) {
  int k = 0;
  while ((std::size_t(1) << k) < n) ++k;
  return k;
}

std::vector<cplx> unit_diag_entries(std::size_t n, Rng& rng, DiagKind kind) {
  std::vector<cplx> d(n);
  for (auto& x : d) {
    if (kind == DiagKind::sign)
      x = rng.sign();
    else
      x = std::polar(1.0, 2.0 * std::numbers::pi * rng.u01());
  }
  return d;
}

mult::GivensChain random_chain(std::size_t n, Rng& rng) {
  mult::GivensChain c;
  c.theta.resize(n - 1);
  for (auto& t : c.theta) t = 2.0 * std::numbers::pi * rng.u01();
  c.perm = rng.permutation(n);
  return c;
}

mult::Reflector random_reflector(std::size_t n, Rng& rng) {
  mult::Reflector r;
  r.h = rng.gaussian_vector(n);
  r.hth = 0;
  for (double v : r.h) r.hth += v * v;
  return r;
}

}  // namespace

std::vector<cplx> Multiplier::apply(std::span<const cplx> x) const { return apply_impl(x, false); }
std::vector<double> Multiplier::apply(std::span<const double> x) const { return apply_impl(x, false); }
std::vector<cplx> Multiplier::apply_transpose(std::span<const cplx> x) const { return apply_impl(x, true); }
std::vector<double> Multiplier::apply_transpose(std::span<const double> x) const { return apply_impl(x, true); }

RealMatrix Multiplier::materialize_real() const {
  if (!real_) throw std::logic_error("materialize_real on a complex-valued multiplier");
  RealMatrix m(rows_, cols_);
  std::vector<double> e(cols_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    e[j] = 1.0;
    const auto col = apply(std::span<const double>(e));
    for (std::size_t i = 0; i < rows_; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

ComplexMatrix Multiplier::materialize_complex() const {
  ComplexMatrix m(rows_, cols_);
  std::vector<cplx> e(cols_, cplx{});
  for (std::size_t j = 0; j < cols_; ++j) {
    e[j] = 1.0;
    const auto col = apply(std::span<const cplx>(e));
    for (std::size_t i = 0; i < rows_; ++i) m(i, j) = col[i];
    e[j] = cplx{};
  }
  return m;
}

Multiplier make_bidiag_inv_fixed(std::size_t n, const std::vector<cplx>& subdiag, double alpha,
                                 std::vector<double> scale) {
  if (subdiag.size() != n) throw BadParam("bidiag_inv: subdiagonal length must be n");
  if (alpha == 0.0) throw BadParam("bidiag_inv: zero diagonal");
  mult::BidiagInv b;
  b.alpha = alpha;
  b.sub = subdiag;
  b.scale = std::move(scale);
  b.real = true;
  for (const auto& d : b.sub)
    if (d.imag() != 0.0) b.real = false;
  const bool real = b.real;
  return Multiplier(Family::bidiag_inv, n, n, real, (long long)n - 1, 2.0 * double(n) - 1.0,
                    std::move(b));
}

Multiplier make_bidiag_inv(std::size_t n, Rng& rng, DiagKind diag, double alpha, bool pow2_scale) {
  std::vector<cplx> sub(n);
  sub[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    sub[i] = (diag == DiagKind::sign) ? cplx(rng.sign(), 0.0)
                                      : std::polar(1.0, 2.0 * std::numbers::pi * rng.u01());
  }
  std::vector<double> scale;
  long long extra = 0;
  if (pow2_scale) {
    scale.resize(n);
    for (auto& s : scale) s = rng.sign() * std::pow(2.0, double(rng.uniform_index(4)));
    extra = (long long)n;
  }
  auto m = make_bidiag_inv_fixed(n, sub, alpha, std::move(scale));
  return Multiplier(Family::bidiag_inv, n, n, m.is_real(), (long long)n - 1 + extra,
                    2.0 * double(n) - 1.0, m.storage());
}

Multiplier make_givens_dft(std::size_t n, Rng& rng, DiagKind diag) {
  if (n < 2) throw BadSize("givens_dft: need n >= 2");
  mult::ChainFactor c;
  c.n = n;
  c.d1.d = unit_diag_entries(n, rng, diag);
  c.d2.d = unit_diag_entries(n, rng, diag);
  c.d3.d = unit_diag_entries(n, rng, diag);
  c.chains.push_back(random_chain(n, rng));
  c.chains.push_back(random_chain(n, rng));
  c.scale = 1.0 / std::sqrt(double(n));
  // 3n diagonal + 2(n-1) angles + 2n permutation draws
  return Multiplier(Family::givens_dft, n, n, false, 7 * (long long)n - 2,
                    10.0 * double(n) + 1.5 * double(n) * std::log2(double(n)), std::move(c));
}

Multiplier make_householder_dft(std::size_t n, Rng& rng, DiagKind diag) {
  if (n < 2) throw BadSize("householder_dft: need n >= 2");
  mult::ChainFactor c;
  c.n = n;
  c.d1.d = unit_diag_entries(n, rng, diag);
  c.d2.d = unit_diag_entries(n, rng, diag);
  c.d3.d = unit_diag_entries(n, rng, diag);
  c.reflectors.push_back(random_reflector(n, rng));
  c.reflectors.push_back(random_reflector(n, rng));
  c.rperm1 = rng.permutation(n);
  c.rperm2 = rng.permutation(n);
  c.scale = 1.0 / std::sqrt(double(n));
  return Multiplier(Family::householder_dft, n, n, false, 7 * (long long)n,
                    7.0 * double(n) + 1.5 * double(n) * std::log2(double(n)), std::move(c));
}

Multiplier make_f_circulant_fixed(std::vector<cplx> v, cplx f) {
  if (v.empty()) throw BadSize("f_circulant: empty first column");
  const std::size_t n = v.size();
  mult::FCirculant c;
  c.v = std::move(v);
  if (f == cplx{}) {
    c.root = cplx{};
  } else {
    // principal n-th root of the wrap scalar
    c.root = std::polar(std::pow(std::abs(f), 1.0 / double(n)), std::arg(f) / double(n));
  }
  c.real = f.imag() == 0.0;
  for (const auto& x : c.v)
    if (x.imag() != 0.0) c.real = false;
  c.finalize();
  if (f != cplx{}) c.wrap = f;  // keep the requested wrap scalar exactly
  const bool real = c.real;
  return Multiplier(Family::f_circulant, n, n, real, (long long)n,
                    9.0 * double(n) * std::log2(double(std::max<std::size_t>(n, 2))) + 3.0 * double(n),
                    std::move(c));
}

Multiplier make_f_circulant_with_root(std::vector<cplx> v, cplx root) {
  if (v.empty()) throw BadSize("f_circulant: empty first column");
  if (root == cplx{}) throw ZeroF();
  const std::size_t n = v.size();
  mult::FCirculant c;
  c.v = std::move(v);
  c.root = root;
  c.finalize();
  c.real = c.wrap.imag() == 0.0;
  for (const auto& x : c.v)
    if (x.imag() != 0.0) c.real = false;
  const bool real = c.real;
  return Multiplier(Family::f_circulant, n, n, real, (long long)n,
                    9.0 * double(n) * std::log2(double(std::max<std::size_t>(n, 2))) + 3.0 * double(n),
                    std::move(c));
}

namespace {

// the family contract wants nonsingular draws; the spectrum is exact, so a
// (near-)singular first column is rejected and redrawn. +-1 columns are
// exactly singular with probability ~ 2 sqrt(2/(pi n)).
Multiplier nonsingular_circulant_draw(std::size_t n, Rng& rng, cplx f,
                                      const std::function<double()>& draw) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = draw();
    auto m = make_f_circulant_fixed(std::move(v), f);
    const auto& fam = std::get<mult::FCirculant>(m.storage());
    double mn = std::numeric_limits<double>::infinity(), mx = 0;
    for (const auto& g : fam.eig) {
      mn = std::min(mn, std::abs(g));
      mx = std::max(mx, std::abs(g));
    }
    if (mn > 1e-8 * mx) return m;
  }
  throw BadParam("f_circulant: could not draw a nonsingular first column");
}

}  // namespace

Multiplier make_f_circulant(std::size_t n, Rng& rng, cplx f) {
  return nonsingular_circulant_draw(n, rng, f, [&rng] { return rng.gaussian(); });
}

Multiplier make_gaussian_circulant(std::size_t n, Rng& rng) {
  return make_f_circulant(n, rng, cplx{1.0, 0.0});
}

Multiplier make_sign_circulant(std::size_t n, Rng& rng) {
  return nonsingular_circulant_draw(n, rng, cplx{1.0, 0.0}, [&rng] { return rng.sign(); });
}

Multiplier make_arsph(std::size_t n, int d, Rng& rng, TransformKind kind, DiagKind diag) {
  require_pow2(n, "arsph");
  const int k = log2_size(n);
  auto t = std::make_shared<RecursiveTransform>(build_recursive_transform(k, d, kind, rng, diag));
  const bool real = t->is_real();
  const long long rv = t->random_variables();
  const double fl = t->flop_bound();
  return Multiplier(Family::arsph, n, n, real, rv, fl, mult::ArsphWrap{std::move(t)});
}

Multiplier make_sparse_f_circulant_fixed(std::size_t n, cplx f,
                                         std::vector<std::pair<std::size_t, cplx>> entries) {
  if (std::abs(std::abs(f) - 1.0) > 1e-12) throw BadParam("sparse circulant: |f| must be 1");
  if (entries.empty() || entries.size() >= n) throw BadParam("sparse circulant: need 1 <= q < n");
  mult::SparseFCirculant s;
  s.n = n;
  s.f = f;
  s.entries = std::move(entries);
  s.real = f.imag() == 0.0;
  for (const auto& [i, val] : s.entries) {
    if (i >= n) throw BadParam("sparse circulant: shift out of range");
    if (val.imag() != 0.0) s.real = false;
  }
  const std::size_t q = s.entries.size();
  const bool real = s.real;
  return Multiplier(Family::sparse_f_circulant, n, n, real, 2 * (long long)q + 1,
                    (2.0 * double(q) - 1.0) * double(n), std::move(s));
}

Multiplier make_sparse_f_circulant(std::size_t n, std::size_t q, Rng& rng, cplx f) {
  if (q < 1 || q >= n) throw BadParam("sparse circulant: need 1 <= q < n");
  // q distinct shift positions, +-1 values
  std::vector<int> perm = rng.permutation(n);
  std::vector<std::pair<std::size_t, cplx>> entries(q);
  for (std::size_t t = 0; t < q; ++t) entries[t] = {std::size_t(perm[t]), cplx(rng.sign(), 0.0)};
  return make_sparse_f_circulant_fixed(n, f, std::move(entries));
}

Multiplier make_abridged_circulant(std::size_t n, int d, Rng& rng, cplx f, bool hadamard_core) {
  require_pow2(n, "abridged_circulant");
  if (std::abs(std::abs(f) - 1.0) > 1e-12) throw BadParam("abridged circulant: |f| must be 1");
  const int k = log2_size(n);
  mult::AbridgedCirculant a;
  a.m = std::make_shared<RecursiveTransform>(
      RecursiveTransform(k, d, hadamard_core ? TransformKind::ah : TransformKind::af));
  a.diag.d = unit_diag_entries(n, rng, DiagKind::phase);
  a.diag.real = false;
  a.inv_scale = std::pow(0.5, double(d));
  if (f != cplx{1.0, 0.0}) {
    a.df.resize(n);
    cplx p{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      a.df[i] = p;
      p *= f;
    }
  }
  return Multiplier(Family::abridged_circulant, n, n, false, (long long)n,
                    6.0 * double(d) * double(n) + 4.0 * double(n), std::move(a));
}

Multiplier make_givens_abridged(std::size_t n, int d, Rng& rng, bool hadamard_core, DiagKind diag) {
  require_pow2(n, "givens_abridged");
  const int k = log2_size(n);
  mult::ChainFactor c;
  c.n = n;
  c.d1.d = unit_diag_entries(n, rng, diag);
  c.d2.d = unit_diag_entries(n, rng, diag);
  c.d3.d = unit_diag_entries(n, rng, diag);
  c.chains.push_back(random_chain(n, rng));
  c.chains.push_back(random_chain(n, rng));
  c.m = std::make_shared<RecursiveTransform>(
      RecursiveTransform(k, d, hadamard_core ? TransformKind::ah : TransformKind::af));
  c.scale = 1.0;  // the displayed product carries no 1/sqrt(n)
  const bool real = hadamard_core && diag == DiagKind::sign;
  return Multiplier(Family::givens_abridged, n, n, real, 7 * (long long)n - 2,
                    (1.5 * double(d) + 10.0) * double(n), std::move(c));
}

Multiplier make_householder_abridged(std::size_t n, int d, Rng& rng, bool hadamard_core,
                                     DiagKind diag) {
  require_pow2(n, "householder_abridged");
  const int k = log2_size(n);
  mult::ChainFactor c;
  c.n = n;
  c.d1.d = unit_diag_entries(n, rng, diag);
  c.d2.d = unit_diag_entries(n, rng, diag);
  c.d3.d = unit_diag_entries(n, rng, diag);
  c.reflectors.push_back(random_reflector(n, rng));
  c.reflectors.push_back(random_reflector(n, rng));
  c.rperm1 = rng.permutation(n);
  c.rperm2 = rng.permutation(n);
  c.m = std::make_shared<RecursiveTransform>(
      RecursiveTransform(k, d, hadamard_core ? TransformKind::ah : TransformKind::af));
  c.scale = 1.0 / std::sqrt(double(n));
  const bool real = hadamard_core && diag == DiagKind::sign;
  return Multiplier(Family::householder_abridged, n, n, real, 7 * (long long)n,
                    (1.5 * double(d) + 7.0) * double(n), std::move(c));
}

Multiplier make_prbt(std::size_t n, Rng& rng, int depth) {
  require_pow2(n, "prbt");
  const int k = log2_size(n);
  if (depth < 1 || depth > k) throw BadDepth("prbt: need 1 <= depth <= log2(n)");
  mult::Prbt p;
  p.n = n;
  p.depth = depth;
  p.diag.resize(std::size_t(depth));
  long long rv = 0;
  for (int j = 0; j < depth; ++j) {
    p.diag[std::size_t(j)].resize(n);
    for (auto& x : p.diag[std::size_t(j)]) x = rng.sign();
    rv += (long long)n;
  }
  return Multiplier(Family::prbt, n, n, true, rv, 3.0 * double(depth) * double(n), std::move(p));
}

Multiplier make_gaussian(std::size_t n, Rng& rng) {
  mult::Dense d;
  d.real_m = RealMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d.real_m(i, j) = rng.gaussian();
  d.real = true;
  return Multiplier(Family::gaussian, n, n, true, (long long)n * (long long)n,
                    (2.0 * double(n) - 1.0) * double(n), std::move(d));
}

Multiplier make_unitary_circulant_from_first_column(std::vector<cplx> v) {
  auto m = make_f_circulant_fixed(std::move(v), cplx{1.0, 0.0});
  return Multiplier(Family::unitary_circulant, m.rows(), m.cols(), m.is_real(),
                    m.random_variables(), m.flop_bound(), m.storage());
}

Multiplier make_unitary_circulant(std::size_t n, Rng& rng, bool signs) {
  // unit-modulus spectrum g, first column v = Omega^{-1} g
  std::vector<cplx> g(n);
  for (auto& x : g) {
    if (signs)
      x = rng.sign();
    else
      x = std::polar(1.0, 2.0 * std::numbers::pi * rng.u01());
  }
  auto v = fft_apply(g, FftDirection::inverse);
  return make_unitary_circulant_from_first_column(std::move(v));
}

Multiplier make_dense(RealMatrix m) {
  const std::size_t r = m.rows(), c = m.cols();
  mult::Dense d;
  d.real_m = std::move(m);
  d.real = true;
  return Multiplier(Family::gaussian, r, c, true, (long long)r * (long long)c,
                    (2.0 * double(c) - 1.0) * double(r), std::move(d));
}

Multiplier make_dense(ComplexMatrix m) {
  const std::size_t r = m.rows(), c = m.cols();
  mult::Dense d;
  d.cplx_m = std::move(m);
  d.real = false;
  return Multiplier(Family::gaussian, r, c, false, (long long)r * (long long)c,
                    (2.0 * double(c) - 1.0) * double(r), std::move(d));
}

Multiplier srft(std::size_t n, std::size_t h, Rng& rng) {
  if (h < 1 || h > n) throw BadSize("srft: need 1 <= h <= n");
  mult::Srft s;
  s.n = n;
  s.h = h;
  s.d.resize(n);
  for (auto& x : s.d) x = std::polar(1.0, 2.0 * std::numbers::pi * rng.u01());
  const auto perm = rng.permutation(n);
  s.cols.assign(perm.begin(), perm.begin() + long(h));
  s.scale = std::sqrt(double(n) / double(h));
  return Multiplier(Family::srft, n, h, false, (long long)n + (long long)h,
                    6.0 * double(n) * std::log2(double(std::max<std::size_t>(n, 2))), std::move(s));
}

Multiplier combine(const Multiplier& h1, const Multiplier& h2, CombineMode mode) {
  if (h1.rows() != h2.rows() || h1.cols() != h2.cols() || h1.rows() != h1.cols())
    throw DimensionMismatch("combine: multipliers must be square and equal-sized");
  const std::size_t n = h1.rows();
  const long long rv = h1.random_variables() + h2.random_variables();
  if (mode == CombineMode::product) {
    mult::Combo c;
    c.mode = mode;
    c.a = std::make_shared<Multiplier>(h1);
    c.b = std::make_shared<Multiplier>(h2);
    return Multiplier(Family::combo, n, n, h1.is_real() && h2.is_real(), rv,
                      h1.flop_bound() + h2.flop_bound(), std::move(c));
  }
  // sum: circulant algebra closes when both wrap scalars agree
  const auto* c1 = std::get_if<mult::FCirculant>(&h1.storage());
  const auto* c2 = std::get_if<mult::FCirculant>(&h2.storage());
  if (c1 && c2 && c1->wrap == c2->wrap && c1->root != cplx{}) {
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = c1->v[i] + c2->v[i];
    auto m = make_f_circulant_fixed(std::move(v), c1->wrap);
    return Multiplier(Family::f_circulant, n, n, m.is_real(), rv, m.flop_bound(), m.storage());
  }
  // mixed families fall back to a dense sum
  if (h1.is_real() && h2.is_real()) {
    RealMatrix m = h1.materialize_real();
    m += h2.materialize_real();
    auto d = make_dense(std::move(m));
    return Multiplier(Family::combo, n, n, true, rv, d.flop_bound(), d.storage());
  }
  ComplexMatrix m = h1.materialize_complex();
  m += h2.materialize_complex();
  auto d = make_dense(std::move(m));
  return Multiplier(Family::combo, n, n, false, rv, d.flop_bound(), d.storage());
}

namespace {

template <typename T>
Matrix<T> apply_right_generic(const Matrix<T>& a, const Multiplier& h) {
  if (a.cols() != h.rows()) throw DimensionMismatch("apply_right: sizes differ");
  // dense multipliers go through the blocked product
  if (const auto* d = std::get_if<mult::Dense>(&h.storage())) {
    if (d->real)
      return matmul(a, d->real_m);
    else if constexpr (is_complex_v<T>)
      return matmul(a, d->cplx_m);
    else
      throw std::logic_error("complex multiplier applied to real data; promote first");
  }
  Matrix<T> out(a.rows(), h.cols());
  std::vector<T> row(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] = a(i, j);
    const auto r = h.apply_transpose(std::span<const T>(row));
    for (std::size_t j = 0; j < h.cols(); ++j) out(i, j) = r[j];
  }
  return out;
}

template <typename T>
Matrix<T> apply_left_generic(const Multiplier& f, const Matrix<T>& a) {
  if (f.cols() != a.rows()) throw DimensionMismatch("apply_left: sizes differ");
  if (const auto* d = std::get_if<mult::Dense>(&f.storage())) {
    if (d->real)
      return matmul(d->real_m, a);
    else if constexpr (is_complex_v<T>)
      return matmul(d->cplx_m, a);
    else
      throw std::logic_error("complex multiplier applied to real data; promote first");
  }
  Matrix<T> out(f.rows(), a.cols());
  std::vector<T> col(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) col[i] = a(i, j);
    const auto c = f.apply(std::span<const T>(col));
    for (std::size_t i = 0; i < f.rows(); ++i) out(i, j) = c[i];
  }
  return out;
}

}  // namespace

RealMatrix apply_right_real(const RealMatrix& a, const Multiplier& h) {
  if (!h.is_real()) throw std::logic_error("apply_right_real: multiplier is complex-valued");
  return apply_right_generic(a, h);
}
ComplexMatrix apply_right_complex(const ComplexMatrix& a, const Multiplier& h) {
  return apply_right_generic(a, h);
}
RealMatrix apply_left_real(const Multiplier& f, const RealMatrix& a) {
  if (!f.is_real()) throw std::logic_error("apply_left_real: multiplier is complex-valued");
  return apply_left_generic(f, a);
}
ComplexMatrix apply_left_complex(const Multiplier& f, const ComplexMatrix& a) {
  return apply_left_generic(f, a);
}

CirculantSpectrum circulant_spectrum(const std::vector<cplx>& v, cplx f) {
  if (f == cplx{}) throw ZeroF();
  const std::size_t n = v.size();
  const cplx root = std::polar(std::pow(std::abs(f), 1.0 / double(n)), std::arg(f) / double(n));
  std::vector<cplx> t(n);
  cplx p{1.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = v[i] * p;
    p *= root;
  }
  CirculantSpectrum s;
  s.eigenvalues = fft_apply(t, FftDirection::forward);
  double mx = 0, mn = std::numeric_limits<double>::infinity();
  for (const auto& g : s.eigenvalues) {
    mx = std::max(mx, std::abs(g));
    mn = std::min(mn, std::abs(g));
  }
  s.norm = mx;
  s.inverse_norm = mn > 0 ? 1.0 / mn : std::numeric_limits<double>::infinity();
  s.kappa = mn > 0 ? mx / mn : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace genpx
