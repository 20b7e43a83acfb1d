#pragma once

#include <memory>
#include <variant>

#include "genpx/fft.hpp"
#include "genpx/matrix.hpp"
#include "genpx/rng.hpp"
#include "genpx/transform.hpp"

namespace genpx {

struct BadSize : std::invalid_argument {
  explicit BadSize(const std::string& what) : std::invalid_argument(what) {}
};
struct BadParam : std::invalid_argument {
  explicit BadParam(const std::string& what) : std::invalid_argument(what) {}
};
struct ZeroF : std::invalid_argument {
  ZeroF() : std::invalid_argument("f-circulant scalar f must be nonzero") {}
};

enum class Family {
  bidiag_inv,
  givens_dft,
  householder_dft,
  f_circulant,
  arsph,
  sparse_f_circulant,
  abridged_circulant,
  givens_abridged,
  householder_abridged,
  prbt,
  gaussian,
  unitary_circulant,
  srft,
  combo
};

enum class CombineMode { sum, product };

namespace mult {

// permuted chain of Givens rotations: P * G(n-1,n) * ... * G(1,2) applied
// with G(1,2,theta_1) acting first
struct GivensChain {
  std::vector<double> theta;  // n-1 angles
  std::vector<int> perm;      // output gather map

  template <typename T>
  void apply(std::vector<T>& x) const {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double c = std::cos(theta[i]), s = std::sin(theta[i]);
      const T a = x[i], b = x[i + 1];
      x[i] = c * a + s * b;
      x[i + 1] = -s * a + c * b;
    }
    std::vector<T> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = x[std::size_t(perm[i])];
    x = std::move(t);
  }

  template <typename T>
  void apply_transpose(std::vector<T>& x) const {
    const std::size_t n = x.size();
    std::vector<T> t(n);
    for (std::size_t i = 0; i < n; ++i) t[std::size_t(perm[i])] = x[i];
    x = std::move(t);
    for (std::size_t ii = n - 1; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      const double c = std::cos(theta[i]), s = std::sin(theta[i]);
      const T a = x[i], b = x[i + 1];
      x[i] = c * a - s * b;
      x[i + 1] = s * a + c * b;
    }
  }
};

// I - 2 h h^T / (h^T h), real vector h, symmetric
struct Reflector {
  std::vector<double> h;
  double hth = 0;

  template <typename T>
  void apply(std::vector<T>& x) const {
    T dot{};
    for (std::size_t i = 0; i < x.size(); ++i) dot += h[i] * x[i];
    const T scale = T{2.0 / hth} * dot;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= scale * h[i];
  }
};

struct UnitDiag {
  std::vector<cplx> d;  // empty = identity
  bool real = true;

  template <typename T>
  void apply(std::vector<T>& x) const {
    if (d.empty()) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if constexpr (is_complex_v<T>)
        x[i] *= d[i];
      else
        x[i] *= d[i].real();
    }
  }
  template <typename T>
  void apply_inverse(std::vector<T>& x) const {
    if (d.empty()) return;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if constexpr (is_complex_v<T>)
        x[i] *= std::conj(d[i]);  // |d| = 1
      else
        x[i] *= d[i].real();
    }
  }
};

struct BidiagInv {
  // H = S (alpha I + D Z)^{-1} for the down-shift Z; S optional outer scaling
  double alpha = 1.0;
  std::vector<cplx> sub;     // n entries, sub[0] unused
  std::vector<double> scale; // empty = identity
  bool real = true;

  template <typename T>
  void apply(std::vector<T>& x) const {
    const std::size_t n = x.size();
    x[0] /= alpha;
    for (std::size_t i = 1; i < n; ++i) {
      T s = x[i];
      if constexpr (is_complex_v<T>)
        s -= sub[i] * x[i - 1];
      else
        s -= sub[i].real() * x[i - 1];
      x[i] = s / T{alpha};
    }
    if (!scale.empty())
      for (std::size_t i = 0; i < n; ++i) x[i] *= scale[i];
  }

  template <typename T>
  void apply_transpose(std::vector<T>& x) const {
    const std::size_t n = x.size();
    if (!scale.empty())
      for (std::size_t i = 0; i < n; ++i) x[i] *= scale[i];
    x[n - 1] /= alpha;
    for (std::size_t ii = n - 1; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      T s = x[i];
      if constexpr (is_complex_v<T>)
        s -= sub[i + 1] * x[i + 1];
      else
        s -= sub[i + 1].real() * x[i + 1];
      x[i] = s / T{alpha};
    }
  }
};

// Z_{root^n}(v): first column v, wrap scalar f = root^n, diagonalized by
// Omega D(root^i). root == 0 marks the triangular-Toeplitz case (dense apply).
struct FCirculant {
  std::vector<cplx> v;
  cplx root{1.0, 0.0};
  cplx wrap{1.0, 0.0};          // root^n
  bool real = true;             // v real and wrap scalar real
  bool unit_root = true;        // root == 1, scaling loops skipped
  std::vector<cplx> rootpow;    // root^i, empty when unit_root
  std::vector<cplx> eig;        // Omega D(root^i) v, empty when root == 0

  void finalize() {
    const std::size_t n = v.size();
    wrap = (root == cplx{}) ? cplx{} : std::pow(root, double(n));
    unit_root = root == cplx{1.0, 0.0};
    rootpow.clear();
    eig.clear();
    if (root == cplx{}) return;  // dense path only
    std::vector<cplx> t = v;
    if (!unit_root) {
      rootpow.resize(n);
      cplx p{1.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        rootpow[i] = p;
        t[i] *= p;
        p *= root;
      }
    }
    eig = fft_apply(t, FftDirection::forward);
  }

  ComplexMatrix dense() const {
    const std::size_t n = v.size();
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = (i >= j) ? v[i - j] : wrap * v[n + i - j];
    return m;
  }

  void apply_complex(std::vector<cplx>& x) const {
    const std::size_t n = x.size();
    if (!unit_root)
      for (std::size_t i = 0; i < n; ++i) x[i] *= rootpow[i];
    x = fft_apply(x, FftDirection::forward);
    for (std::size_t i = 0; i < n; ++i) x[i] *= eig[i];
    x = fft_apply(x, FftDirection::inverse);
    if (!unit_root)
      for (std::size_t i = 0; i < n; ++i) x[i] /= rootpow[i];
  }

  void apply_transpose_complex(std::vector<cplx>& x) const {
    // Z^T = D(root) Omega D(eig) Omega^{-1} D(root)^{-1}
    const std::size_t n = x.size();
    if (!unit_root)
      for (std::size_t i = 0; i < n; ++i) x[i] /= rootpow[i];
    x = fft_apply(x, FftDirection::inverse);
    for (std::size_t i = 0; i < n; ++i) x[i] *= eig[i];
    x = fft_apply(x, FftDirection::forward);
    if (!unit_root)
      for (std::size_t i = 0; i < n; ++i) x[i] *= rootpow[i];
  }
};

struct SparseFCirculant {
  std::size_t n = 0;
  cplx f{1.0, 0.0};
  std::vector<std::pair<std::size_t, cplx>> entries;  // (shift, value)
  bool real = true;

  template <typename T>
  void apply(std::vector<T>& x) const {
    std::vector<T> y(n, T{});
    for (const auto& [shift, val] : entries) {
      for (std::size_t j = 0; j < n; ++j) {
        T contrib = (j >= shift) ? x[j - shift] : x[j + n - shift];
        if (j < shift) {
          if constexpr (is_complex_v<T>)
            contrib *= f;
          else
            contrib *= f.real();
        }
        if constexpr (is_complex_v<T>)
          y[j] += val * contrib;
        else
          y[j] += val.real() * contrib;
      }
    }
    x = std::move(y);
  }

  template <typename T>
  void apply_transpose(std::vector<T>& x) const {
    std::vector<T> y(n, T{});
    for (const auto& [shift, val] : entries) {
      for (std::size_t i = 0; i < n; ++i) {
        // contribution of entry (i, j) with i - j = shift mod n
        const std::size_t j = (i >= shift) ? i - shift : i + n - shift;
        T contrib = x[i];
        if (i < shift) {
          if constexpr (is_complex_v<T>)
            contrib *= f;
          else
            contrib *= f.real();
        }
        if constexpr (is_complex_v<T>)
          y[j] += val * contrib;
        else
          y[j] += val.real() * contrib;
      }
    }
    x = std::move(y);
  }
};

// H = (M D_f)^{-1} D M D_f for an AF/AH transform M of depth d
struct AbridgedCirculant {
  std::shared_ptr<const RecursiveTransform> m;
  UnitDiag diag;           // D
  std::vector<cplx> df;    // f^i, empty when f == 1
  double inv_scale = 1.0;  // 2^{-d}, since M^H M = 2^d I

  void apply_complex(std::vector<cplx>& x) const {
    if (!df.empty())
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= df[i];
    x = m->apply(std::span<const cplx>(x));
    diag.apply(x);
    x = m->apply_conj_transpose(std::span<const cplx>(x));
    for (auto& v : x) v *= inv_scale;
    if (!df.empty())
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= std::conj(df[i]);
  }

  void apply_transpose_complex(std::vector<cplx>& x) const {
    // H^T = D_f M^T D M^{-T} D_f^{-1}, with M^{-T} = 2^{-d} conj(M)
    if (!df.empty())
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= std::conj(df[i]);
    for (auto& v : x) v = std::conj(v);
    x = m->apply(std::span<const cplx>(x));
    for (auto& v : x) v = std::conj(v) * inv_scale;
    diag.apply(x);
    x = m->apply_transpose(std::span<const cplx>(x));
    if (!df.empty())
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= df[i];
  }
};

// D1 C1 D2 C2 D3 M (optionally scaled by 1/sqrt(n)); C = Givens chains or
// Householder reflections, M = DFT or an abridged transform
struct ChainFactor {
  UnitDiag d1, d2, d3;
  std::vector<GivensChain> chains;      // size 2 when Givens-based
  std::vector<Reflector> reflectors;    // size 2 when Householder-based
  std::vector<int> rperm1, rperm2;      // reflection-side permutations
  std::shared_ptr<const RecursiveTransform> m;  // null = full DFT
  std::size_t n = 0;
  double scale = 1.0;
  bool use_fft = false;

  void apply_complex(std::vector<cplx>& x) const {
    if (m)
      x = m->apply(std::span<const cplx>(x));
    else
      x = fft_apply(x, FftDirection::forward);
    d3.apply(x);
    middle(x, 1);
    d2.apply(x);
    middle(x, 0);
    d1.apply(x);
    if (scale != 1.0)
      for (auto& v : x) v *= scale;
  }

  void apply_transpose_complex(std::vector<cplx>& x) const {
    if (scale != 1.0)
      for (auto& v : x) v *= scale;
    d1.apply(x);
    middle_t(x, 0);
    d2.apply(x);
    middle_t(x, 1);
    d3.apply(x);
    if (m)
      x = m->apply_transpose(std::span<const cplx>(x));
    else
      x = fft_apply(x, FftDirection::forward);  // Omega is symmetric
  }

 private:
  void middle(std::vector<cplx>& x, int idx) const {
    if (!chains.empty()) {
      chains[std::size_t(idx)].apply(x);
    } else {
      reflectors[std::size_t(idx)].apply(x);
      const auto& p = idx == 0 ? rperm1 : rperm2;
      std::vector<cplx> t(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) t[i] = x[std::size_t(p[i])];
      x = std::move(t);
    }
  }
  void middle_t(std::vector<cplx>& x, int idx) const {
    if (!chains.empty()) {
      chains[std::size_t(idx)].apply_transpose(x);
    } else {
      const auto& p = idx == 0 ? rperm1 : rperm2;
      std::vector<cplx> t(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) t[std::size_t(p[i])] = x[i];
      x = std::move(t);
      reflectors[std::size_t(idx)].apply(x);
    }
  }
};

struct Prbt {
  std::size_t n = 0;
  int depth = 2;
  // level j has 2^j blocks; diag[j] holds the concatenated (R, S) diagonals
  std::vector<std::vector<double>> diag;

  template <typename T>
  void apply(std::vector<T>& x) const {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < depth; ++j) {
      const std::size_t bs = n >> j;
      for (std::size_t b = 0; b < n; b += bs) {
        const double* dj = diag[std::size_t(j)].data() + b;
        for (std::size_t i = 0; i < bs; ++i) x[b + i] *= dj[i];
        const std::size_t h = bs / 2;
        for (std::size_t i = 0; i < h; ++i) {
          const T a = x[b + i] + x[b + i + h];
          const T c = x[b + i] - x[b + i + h];
          x[b + i] = a * inv_sqrt2;
          x[b + i + h] = c * inv_sqrt2;
        }
      }
    }
  }

  template <typename T>
  void apply_transpose(std::vector<T>& x) const {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = depth - 1; j >= 0; --j) {
      const std::size_t bs = n >> j;
      for (std::size_t b = 0; b < n; b += bs) {
        const std::size_t h = bs / 2;
        for (std::size_t i = 0; i < h; ++i) {
          const T a = x[b + i] + x[b + i + h];
          const T c = x[b + i] - x[b + i + h];
          x[b + i] = a * inv_sqrt2;
          x[b + i + h] = c * inv_sqrt2;
        }
        const double* dj = diag[std::size_t(j)].data() + b;
        for (std::size_t i = 0; i < bs; ++i) x[b + i] *= dj[i];
      }
    }
  }
};

struct Dense {
  RealMatrix real_m;
  ComplexMatrix cplx_m;
  bool real = true;
};

struct ArsphWrap {
  std::shared_ptr<const RecursiveTransform> t;
};

// sqrt(n/h) D Omega R: h distinct columns of the DFT, phase-scaled rows
struct Srft {
  std::size_t n = 0, h = 0;
  std::vector<cplx> d;
  std::vector<std::size_t> cols;
  double scale = 1.0;

  void apply_complex(std::vector<cplx>& x) const {  // x length h -> length n
    std::vector<cplx> w(n, cplx{});
    for (std::size_t t = 0; t < h; ++t) w[cols[t]] = x[t];
    w = fft_apply(w, FftDirection::forward);
    for (std::size_t i = 0; i < n; ++i) w[i] *= d[i] * scale;
    x = std::move(w);
  }

  void apply_transpose_complex(std::vector<cplx>& x) const {  // length n -> h
    for (std::size_t i = 0; i < n; ++i) x[i] *= d[i] * scale;
    x = fft_apply(x, FftDirection::forward);  // Omega^T = Omega
    std::vector<cplx> y(h);
    for (std::size_t t = 0; t < h; ++t) y[t] = x[cols[t]];
    x = std::move(y);
  }
};

}  // namespace mult

class Multiplier;

namespace mult {
struct Combo {
  CombineMode mode = CombineMode::product;
  std::shared_ptr<const Multiplier> a, b;
};
}  // namespace mult

// Structured multiplier: one of the supported families, applied either
// through its fast path or by materialization.
class Multiplier {
 public:
  using Storage = std::variant<mult::BidiagInv, mult::ChainFactor, mult::FCirculant,
                               mult::ArsphWrap, mult::SparseFCirculant, mult::AbridgedCirculant,
                               mult::Prbt, mult::Dense, mult::Srft, mult::Combo>;

  Multiplier(Family fam, std::size_t rows, std::size_t cols, bool real, long long rv,
             double flops, Storage st)
      : family_(fam), rows_(rows), cols_(cols), real_(real), rv_count_(rv),
        flop_bound_(flops), st_(std::move(st)) {}

  Family family() const { return family_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_real() const { return real_; }
  long long random_variables() const { return rv_count_; }
  double flop_bound() const { return flop_bound_; }

  // y = H x
  std::vector<cplx> apply(std::span<const cplx> x) const;
  std::vector<double> apply(std::span<const double> x) const;
  // y = H^T x (plain transpose, no conjugation)
  std::vector<cplx> apply_transpose(std::span<const cplx> x) const;
  std::vector<double> apply_transpose(std::span<const double> x) const;

  template <typename T>
  std::vector<T> apply(const std::vector<T>& x) const { return apply(std::span<const T>(x)); }
  template <typename T>
  std::vector<T> apply_transpose(const std::vector<T>& x) const {
    return apply_transpose(std::span<const T>(x));
  }

  RealMatrix materialize_real() const;
  ComplexMatrix materialize_complex() const;

  const Storage& storage() const { return st_; }

 private:
  Family family_;
  std::size_t rows_, cols_;
  bool real_;
  long long rv_count_;
  double flop_bound_;
  Storage st_;

  template <typename T>
  std::vector<T> apply_impl(std::span<const T> x, bool transpose) const;
};

// ---- factories -------------------------------------------------------------

Multiplier make_bidiag_inv(std::size_t n, Rng& rng, DiagKind diag = DiagKind::sign,
                           double alpha = 1.0, bool pow2_scale = false);
Multiplier make_bidiag_inv_fixed(std::size_t n, const std::vector<cplx>& subdiag,
                                 double alpha = 1.0, std::vector<double> scale = {});
Multiplier make_givens_dft(std::size_t n, Rng& rng, DiagKind diag = DiagKind::sign);
Multiplier make_householder_dft(std::size_t n, Rng& rng, DiagKind diag = DiagKind::sign);
Multiplier make_f_circulant(std::size_t n, Rng& rng, cplx f);
Multiplier make_f_circulant_fixed(std::vector<cplx> v, cplx f);
Multiplier make_f_circulant_with_root(std::vector<cplx> v, cplx root);
Multiplier make_gaussian_circulant(std::size_t n, Rng& rng);
Multiplier make_sign_circulant(std::size_t n, Rng& rng);
Multiplier make_arsph(std::size_t n, int d, Rng& rng, TransformKind kind = TransformKind::arsph,
                      DiagKind diag = DiagKind::sign);
Multiplier make_sparse_f_circulant(std::size_t n, std::size_t q, Rng& rng, cplx f = 1.0);
Multiplier make_sparse_f_circulant_fixed(std::size_t n, cplx f,
                                         std::vector<std::pair<std::size_t, cplx>> entries);
Multiplier make_abridged_circulant(std::size_t n, int d, Rng& rng, cplx f = 1.0,
                                   bool hadamard_core = false);
Multiplier make_givens_abridged(std::size_t n, int d, Rng& rng, bool hadamard_core = true,
                                DiagKind diag = DiagKind::sign);
Multiplier make_householder_abridged(std::size_t n, int d, Rng& rng, bool hadamard_core = true,
                                     DiagKind diag = DiagKind::sign);
Multiplier make_prbt(std::size_t n, Rng& rng, int depth = 2);
Multiplier make_gaussian(std::size_t n, Rng& rng);
Multiplier make_unitary_circulant(std::size_t n, Rng& rng, bool signs = false);
Multiplier make_unitary_circulant_from_first_column(std::vector<cplx> v);
Multiplier make_dense(RealMatrix m);
Multiplier make_dense(ComplexMatrix m);
Multiplier srft(std::size_t n, std::size_t h, Rng& rng);

Multiplier combine(const Multiplier& h1, const Multiplier& h2, CombineMode mode);

// A -> A H through the structured fast path (rows of A hit H^T)
template <typename T>
Matrix<promote_t<T, double>> apply_right(const Matrix<T>& a, const Multiplier& h);
RealMatrix apply_right_real(const RealMatrix& a, const Multiplier& h);
ComplexMatrix apply_right_complex(const ComplexMatrix& a, const Multiplier& h);

// A -> F A (columns of A hit F)
RealMatrix apply_left_real(const Multiplier& f, const RealMatrix& a);
ComplexMatrix apply_left_complex(const Multiplier& f, const ComplexMatrix& a);

struct CirculantSpectrum {
  std::vector<cplx> eigenvalues;  // g = Omega D(f^i) v
  double norm = 0;                // max |g_i|
  double inverse_norm = 0;        // 1 / min |g_i|
  double kappa = 1;               // max |g_i| / min |g_j|
};

CirculantSpectrum circulant_spectrum(const std::vector<cplx>& v, cplx f);

// ---- inline/template bodies ------------------------------------------------

namespace detail {

template <typename T>
void require_complex_ok(bool multiplier_real) {
  if constexpr (!is_complex_v<T>) {
    if (!multiplier_real)
      throw std::logic_error("complex multiplier applied to real data; promote first");
  }
}

}  // namespace detail

template <typename T>
std::vector<T> Multiplier::apply_impl(std::span<const T> x, bool transpose) const {
  detail::require_complex_ok<T>(real_);
  const std::size_t want = transpose ? rows_ : cols_;
  if (x.size() != want) throw DimensionMismatch("multiplier: vector length mismatch");
  std::vector<T> y(x.begin(), x.end());

  auto complex_path = [&](auto&& fwd, auto&& tr) {
    if constexpr (is_complex_v<T>) {
      if (transpose)
        tr(y);
      else
        fwd(y);
    } else {
      std::vector<cplx> z(x.begin(), x.end());
      if (transpose)
        tr(z);
      else
        fwd(z);
      y.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) y[i] = z[i].real();
    }
  };

  std::visit(
      [&](const auto& fam) {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, mult::BidiagInv>) {
          if (transpose)
            fam.apply_transpose(y);
          else
            fam.apply(y);
        } else if constexpr (std::is_same_v<F, mult::ChainFactor>) {
          complex_path([&](auto& z) { fam.apply_complex(z); },
                       [&](auto& z) { fam.apply_transpose_complex(z); });
        } else if constexpr (std::is_same_v<F, mult::FCirculant>) {
          if (fam.root == cplx{}) {
            // triangular Toeplitz: dense apply on the materialization
            const auto m = fam.dense();
            std::vector<T> out(m.rows(), T{});
            for (std::size_t i = 0; i < m.rows(); ++i)
              for (std::size_t j = 0; j < m.cols(); ++j) {
                const cplx e = transpose ? m(j, i) : m(i, j);
                if constexpr (is_complex_v<T>)
                  out[i] += e * y[j];
                else
                  out[i] += e.real() * y[j];
              }
            y = std::move(out);
          } else {
            complex_path([&](auto& z) { fam.apply_complex(z); },
                         [&](auto& z) { fam.apply_transpose_complex(z); });
          }
        } else if constexpr (std::is_same_v<F, mult::ArsphWrap>) {
          if (transpose)
            y = fam.t->apply_transpose(std::span<const T>(y));
          else
            y = fam.t->apply(std::span<const T>(y));
        } else if constexpr (std::is_same_v<F, mult::SparseFCirculant>) {
          if (transpose)
            fam.apply_transpose(y);
          else
            fam.apply(y);
        } else if constexpr (std::is_same_v<F, mult::AbridgedCirculant>) {
          complex_path([&](auto& z) { fam.apply_complex(z); },
                       [&](auto& z) { fam.apply_transpose_complex(z); });
        } else if constexpr (std::is_same_v<F, mult::Prbt>) {
          if (transpose)
            fam.apply_transpose(y);
          else
            fam.apply(y);
        } else if constexpr (std::is_same_v<F, mult::Dense>) {
          std::vector<T> out(transpose ? cols_ : rows_, T{});
          if (fam.real) {
            const auto& m = fam.real_m;
            if (transpose) {
              for (std::size_t i = 0; i < m.rows(); ++i) {
                const double* mi = m.row(i);
                for (std::size_t j = 0; j < m.cols(); ++j) out[j] += mi[j] * y[i];
              }
            } else {
              for (std::size_t i = 0; i < m.rows(); ++i) {
                const double* mi = m.row(i);
                T s{};
                for (std::size_t j = 0; j < m.cols(); ++j) s += mi[j] * y[j];
                out[i] = s;
              }
            }
          } else {
            if constexpr (is_complex_v<T>) {
              const auto& m = fam.cplx_m;
              if (transpose) {
                for (std::size_t i = 0; i < m.rows(); ++i)
                  for (std::size_t j = 0; j < m.cols(); ++j) out[j] += m(i, j) * y[i];
              } else {
                for (std::size_t i = 0; i < m.rows(); ++i) {
                  T s{};
                  for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * y[j];
                  out[i] = s;
                }
              }
            }
          }
          y = std::move(out);
        } else if constexpr (std::is_same_v<F, mult::Srft>) {
          complex_path([&](auto& z) { fam.apply_complex(z); },
                       [&](auto& z) { fam.apply_transpose_complex(z); });
        } else if constexpr (std::is_same_v<F, mult::Combo>) {
          if (fam.mode == CombineMode::product) {
            if (transpose) {
              y = fam.a->apply_transpose(std::span<const T>(y));
              y = fam.b->apply_transpose(std::span<const T>(y));
            } else {
              y = fam.b->apply(std::span<const T>(y));
              y = fam.a->apply(std::span<const T>(y));
            }
          } else {
            auto ya = transpose ? fam.a->apply_transpose(std::span<const T>(y))
                                : fam.a->apply(std::span<const T>(y));
            auto yb = transpose ? fam.b->apply_transpose(std::span<const T>(y))
                                : fam.b->apply(std::span<const T>(y));
            for (std::size_t i = 0; i < ya.size(); ++i) ya[i] += yb[i];
            y = std::move(ya);
          }
        }
      },
      st_);
  return y;
}

}  // namespace genpx
