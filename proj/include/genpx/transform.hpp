#pragma once

#include <numbers>
#include <string>

#include "genpx/matrix.hpp"
#include "genpx/rng.hpp"

namespace genpx {

struct BadDepth : std::invalid_argument {
  explicit BadDepth(const std::string& what) : std::invalid_argument(what) {}
};

enum class TransformKind { arsph, arph, arsh, ah, aspf, asph, asf, apf, ash, aph, af };

inline const char* transform_kind_name(TransformKind k) {
  switch (k) {
    case TransformKind::arsph: return "arsph";
    case TransformKind::arph: return "arph";
    case TransformKind::arsh: return "arsh";
    case TransformKind::ah: return "ah";
    case TransformKind::aspf: return "aspf";
    case TransformKind::asph: return "asph";
    case TransformKind::asf: return "asf";
    case TransformKind::apf: return "apf";
    case TransformKind::ash: return "ash";
    case TransformKind::aph: return "aph";
    case TransformKind::af: return "af";
  }
  return "?";
}

enum class DiagKind { sign, phase };  // +-1 entries or unit-circle phases

struct FlopCount {
  long long ops = 0;  // adds/subs and scalar multiplies; permutations are free
};

// Abridged recursive Hadamard / Fourier transforms of depth d on 2^k points.
// The butterfly recursion bottoms out at identity blocks of size 2^(k-d), so
// every row and column of the materialized matrix carries 2^d nonzeros.
class RecursiveTransform {
 public:
  RecursiveTransform(int k, int d, TransformKind kind) : k_(k), d_(d), kind_(kind) {
    if (k < 1) throw BadDepth("transform: need k >= 1");
    if (d < 1 || d > k) throw BadDepth("transform: need 1 <= d <= k");
    n_ = std::size_t(1) << k;
    base_ = std::size_t(1) << (k - d);
    if (levelwise()) levels_.resize(std::size_t(d));  // identity factors until randomized
    if (fourier()) {
      twiddle_.resize(std::size_t(d));
      for (int lev = 1; lev <= d; ++lev) {
        const std::size_t m = base_ << lev;
        auto& tw = twiddle_[std::size_t(lev - 1)];
        tw.resize(m / 2);
        for (std::size_t i = 0; i < m / 2; ++i) {
          const double a = 2.0 * std::numbers::pi * double(i) / double(m);
          tw[i] = cplx(std::cos(a), std::sin(a));
        }
      }
      row_record_ = recursion_rows(d, n_);
    }
  }

  std::size_t size() const { return n_; }
  int log2_size() const { return k_; }
  int depth() const { return d_; }
  TransformKind kind() const { return kind_; }
  bool fourier() const {
    return kind_ == TransformKind::aspf || kind_ == TransformKind::asf ||
           kind_ == TransformKind::apf || kind_ == TransformKind::af;
  }
  // factors drawn at every recursion level (vs. outer-factored kinds)
  bool levelwise() const {
    return kind_ == TransformKind::arsph || kind_ == TransformKind::arph ||
           kind_ == TransformKind::arsh || kind_ == TransformKind::ah;
  }
  bool is_real() const { return real_; }

  // rows of the Fourier recursion relative to natural DFT ordering:
  // materialize()(i, j) corresponds to Omega(row_record[i], j) at d == k
  const std::vector<int>& row_record() const { return row_record_; }

  long long random_variables() const { return rv_count_; }
  double flop_bound() const { return (fourier() ? 6.0 : 3.0) * double(d_) * double(n_); }

  template <typename T>
  std::vector<T> apply(std::span<const T> x, FlopCount* fc = nullptr) const {
    check_len(x.size());
    std::vector<T> y(x.begin(), x.end());
    if (levelwise()) {
      h_apply(d_ - 1, y.data(), n_, fc);
    } else {
      scale_all(y, outer_diag_in_, fc);  // outer-factored kinds: P * core * D
      core_apply(d_, y.data(), n_, fc);
      gather(y, outer_perm_);
    }
    return y;
  }

  template <typename T>
  std::vector<T> apply_transpose(std::span<const T> x, FlopCount* fc = nullptr) const {
    check_len(x.size());
    std::vector<T> y(x.begin(), x.end());
    if (levelwise()) {
      h_apply_t(d_ - 1, y.data(), n_, fc);
    } else {
      scatter(y, outer_perm_);
      core_apply_t(d_, y.data(), n_, fc);
      scale_all(y, outer_diag_in_, fc);
    }
    return y;
  }

  std::vector<cplx> apply_conj_transpose(std::span<const cplx> x, FlopCount* fc = nullptr) const {
    std::vector<cplx> y(x.begin(), x.end());
    for (auto& v : y) v = std::conj(v);
    y = apply_transpose(std::span<const cplx>(y), fc);
    for (auto& v : y) v = std::conj(v);
    return y;
  }

  template <typename T>
  Matrix<T> materialize() const {
    Matrix<T> m(n_, n_);
    std::vector<T> e(n_, T{});
    for (std::size_t j = 0; j < n_; ++j) {
      e[j] = T{1};
      auto col = apply(std::span<const T>(e), nullptr);
      for (std::size_t i = 0; i < n_; ++i) m(i, j) = col[i];
      e[j] = T{};
    }
    return m;
  }

  friend RecursiveTransform build_recursive_transform(int k, int d, TransformKind kind, Rng& rng,
                                                      DiagKind diag_kind);

 private:
  struct Level {
    std::vector<int> p_out, p_in;    // empty = identity
    std::vector<cplx> d_out, d_in;   // empty = identity
  };

  int k_ = 0, d_ = 0;
  TransformKind kind_ = TransformKind::ah;
  std::size_t n_ = 0, base_ = 0;
  bool real_ = true;
  long long rv_count_ = 0;
  std::vector<Level> levels_;             // levelwise kinds, index 0 = innermost
  std::vector<int> outer_perm_;           // outer-factored kinds
  std::vector<cplx> outer_diag_in_;
  std::vector<std::vector<cplx>> twiddle_;
  std::vector<int> row_record_;

  void check_len(std::size_t len) const {
    if (len != n_) throw DimensionMismatch("transform: vector length differs from 2^k");
  }

  template <typename T>
  static void mul_diag_entry(T& x, const cplx& d) {
    if constexpr (is_complex_v<T>)
      x *= d;
    else
      x *= d.real();
  }

  template <typename T>
  static void scale_all(std::vector<T>& x, const std::vector<cplx>& d, FlopCount* fc) {
    if (d.empty()) return;
    for (std::size_t i = 0; i < x.size(); ++i) mul_diag_entry(x[i], d[i]);
    if (fc) fc->ops += (long long)x.size();
  }

  template <typename T>
  static void gather(std::vector<T>& x, const std::vector<int>& p) {
    if (p.empty()) return;
    std::vector<T> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[i] = x[std::size_t(p[i])];
    x = std::move(t);
  }

  template <typename T>
  static void scatter(std::vector<T>& x, const std::vector<int>& p) {
    if (p.empty()) return;
    std::vector<T> t(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t[std::size_t(p[i])] = x[i];
    x = std::move(t);
  }

  template <typename T>
  static void gather_block(T* x, const std::vector<int>& p, std::size_t m, std::vector<T>& scratch) {
    if (p.empty()) return;
    scratch.assign(x, x + m);
    for (std::size_t i = 0; i < m; ++i) x[i] = scratch[std::size_t(p[i])];
  }

  template <typename T>
  static void scatter_block(T* x, const std::vector<int>& p, std::size_t m, std::vector<T>& scratch) {
    if (p.empty()) return;
    scratch.assign(x, x + m);
    for (std::size_t i = 0; i < m; ++i) x[std::size_t(p[i])] = scratch[i];
  }

  template <typename T>
  static void butterfly(T* x, std::size_t m, FlopCount* fc) {
    const std::size_t h = m / 2;
    for (std::size_t i = 0; i < h; ++i) {
      const T a = x[i] + x[i + h];
      const T b = x[i] - x[i + h];
      x[i] = a;
      x[i + h] = b;
    }
    if (fc) fc->ops += (long long)m;
  }

  // levelwise step: H_m = D P [[H,H],[H,-H]] Pbar Dbar with the factors of level j
  template <typename T>
  void h_apply(int j, T* x, std::size_t m, FlopCount* fc) const {
    const Level& L = levels_[std::size_t(j)];
    std::vector<T> scratch;
    if (!L.d_in.empty()) {
      for (std::size_t i = 0; i < m; ++i) mul_diag_entry(x[i], L.d_in[i]);
      if (fc) fc->ops += (long long)m;
    }
    gather_block(x, L.p_in, m, scratch);
    butterfly(x, m, fc);
    if (j > 0) {
      h_apply(j - 1, x, m / 2, fc);
      h_apply(j - 1, x + m / 2, m / 2, fc);
    }
    gather_block(x, L.p_out, m, scratch);
    if (!L.d_out.empty()) {
      for (std::size_t i = 0; i < m; ++i) mul_diag_entry(x[i], L.d_out[i]);
      if (fc) fc->ops += (long long)m;
    }
  }

  template <typename T>
  void h_apply_t(int j, T* x, std::size_t m, FlopCount* fc) const {
    const Level& L = levels_[std::size_t(j)];
    std::vector<T> scratch;
    if (!L.d_out.empty()) {
      for (std::size_t i = 0; i < m; ++i) mul_diag_entry(x[i], L.d_out[i]);
      if (fc) fc->ops += (long long)m;
    }
    scatter_block(x, L.p_out, m, scratch);
    if (j > 0) {
      h_apply_t(j - 1, x, m / 2, fc);
      h_apply_t(j - 1, x + m / 2, m / 2, fc);
    }
    butterfly(x, m, fc);
    scatter_block(x, L.p_in, m, scratch);
    if (!L.d_in.empty()) {
      for (std::size_t i = 0; i < m; ++i) mul_diag_entry(x[i], L.d_in[i]);
      if (fc) fc->ops += (long long)m;
    }
  }

  // shared core, Fourier (twiddled, with odd/even sort) or plain Hadamard
  template <typename T>
  void core_apply(int lev, T* x, std::size_t m, FlopCount* fc) const {
    if (lev == 0) return;
    const std::size_t h = m / 2;
    butterfly(x, m, fc);
    if (fourier()) {
      const auto& tw = twiddle_[std::size_t(lev - 1)];
      if constexpr (is_complex_v<T>) {
        for (std::size_t i = 0; i < h; ++i) x[i + h] *= tw[i];
        if (fc) fc->ops += (long long)h;
      } else {
        (void)tw;
        throw std::logic_error("fourier transform applied to a real vector");
      }
    }
    core_apply(lev - 1, x, h, fc);
    core_apply(lev - 1, x + h, h, fc);
    if (fourier()) {
      // odd/even sort: v_j = u_{2j}, v_{j+h} = u_{2j+1}
      std::vector<T> t(x, x + m);
      for (std::size_t j = 0; j < h; ++j) {
        x[j] = t[2 * j];
        x[j + h] = t[2 * j + 1];
      }
    }
  }

  template <typename T>
  void core_apply_t(int lev, T* x, std::size_t m, FlopCount* fc) const {
    if (lev == 0) return;
    const std::size_t h = m / 2;
    if (fourier()) {
      std::vector<T> t(x, x + m);
      for (std::size_t j = 0; j < h; ++j) {
        x[2 * j] = t[j];
        x[2 * j + 1] = t[j + h];
      }
    }
    core_apply_t(lev - 1, x, h, fc);
    core_apply_t(lev - 1, x + h, h, fc);
    if (fourier()) {
      const auto& tw = twiddle_[std::size_t(lev - 1)];
      if constexpr (is_complex_v<T>) {
        for (std::size_t i = 0; i < h; ++i) x[i + h] *= tw[i];
        if (fc) fc->ops += (long long)h;
      } else {
        (void)tw;
        throw std::logic_error("fourier transform applied to a real vector");
      }
    }
    butterfly(x, m, fc);
  }

  static std::vector<int> recursion_rows(int lev, std::size_t m) {
    std::vector<int> r(m);
    if (lev == 0) {
      for (std::size_t i = 0; i < m; ++i) r[i] = int(i);
      return r;
    }
    const std::size_t h = m / 2;
    const auto rh = recursion_rows(lev - 1, h);
    std::vector<int> pg(m), dd(m);
    for (std::size_t j = 0; j < h; ++j) {
      pg[j] = int(2 * j);
      pg[j + h] = int(2 * j + 1);
    }
    for (std::size_t i = 0; i < h; ++i) {
      dd[i] = rh[i];
      dd[i + h] = rh[i] + int(h);
    }
    for (std::size_t i = 0; i < m; ++i) r[i] = pg[std::size_t(dd[std::size_t(pg[i])])];
    return r;
  }
};

inline RecursiveTransform build_recursive_transform(int k, int d, TransformKind kind, Rng& rng,
                                                    DiagKind diag_kind = DiagKind::sign) {
  RecursiveTransform t(k, d, kind);
  const std::size_t n = t.n_;
  auto unit_diag = [&](std::size_t m) {
    std::vector<cplx> dv(m);
    for (auto& x : dv) {
      if (diag_kind == DiagKind::sign)
        x = rng.sign();
      else
        x = std::polar(1.0, 2.0 * std::numbers::pi * rng.u01());
    }
    return dv;
  };

  const bool scaled = kind == TransformKind::arsph || kind == TransformKind::arsh ||
                      kind == TransformKind::aspf || kind == TransformKind::asph ||
                      kind == TransformKind::asf || kind == TransformKind::ash;
  const bool permuted = kind == TransformKind::arsph || kind == TransformKind::arph ||
                        kind == TransformKind::aspf || kind == TransformKind::asph ||
                        kind == TransformKind::apf || kind == TransformKind::aph;

  if (t.levelwise()) {
    t.levels_.resize(std::size_t(d));
    for (int j = 0; j < d; ++j) {
      const std::size_t m = t.base_ << (j + 1);
      auto& L = t.levels_[std::size_t(j)];
      if (permuted) {
        L.p_out = rng.permutation(m);
        L.p_in = rng.permutation(m);
        t.rv_count_ += 2 * (long long)m;
      }
      if (scaled) {
        L.d_out = unit_diag(m);
        L.d_in = unit_diag(m);
        t.rv_count_ += 2 * (long long)m;
      }
    }
  } else {
    if (permuted) {
      t.outer_perm_ = rng.permutation(n);
      t.rv_count_ += (long long)n;
    }
    if (scaled) {
      t.outer_diag_in_ = unit_diag(n);
      t.rv_count_ += (long long)n;
    }
  }
  t.real_ = !t.fourier() && (diag_kind == DiagKind::sign || !scaled);
  return t;
}

}  // namespace genpx
