#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "genpx/fft.hpp"
#include "genpx/transform.hpp"
#include "oracles.hpp"

using namespace genpx;

namespace {

std::vector<cplx> random_cvec(std::size_t n, Rng& rng) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(rng.gaussian(), rng.gaussian());
  return v;
}

constexpr TransformKind kAllKinds[] = {
    TransformKind::arsph, TransformKind::arph, TransformKind::arsh, TransformKind::ah,
    TransformKind::aspf,  TransformKind::asph, TransformKind::asf,  TransformKind::apf,
    TransformKind::ash,   TransformKind::aph,  TransformKind::af};

}  // namespace

TEST_CASE("dft matrix basics") {
  CHECK(dft_matrix(1)(0, 0) == cplx(1.0, 0.0));

  const auto o2 = dft_matrix(2);
  CHECK(std::abs(o2(0, 0) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(o2(0, 1) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(o2(1, 0) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(o2(1, 1) - cplx(-1, 0)) < 1e-15);

  const auto o4 = dft_matrix(4);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(o4(0, j) - cplx(1, 0)) < 1e-15);
  CHECK(std::abs(o4(1, 1) - cplx(0, 1)) < 1e-15);
}

TEST_CASE("dft scaled unitarity") {
  for (std::size_t n : {3u, 8u}) {
    const auto om = dft_matrix(n);
    const auto g = matmul(om.conj_transposed(), om);
    ComplexMatrix ni(n, n);
    for (std::size_t i = 0; i < n; ++i) ni(i, i) = double(n);
    CHECK(frobenius_distance(g, ni) <= 1e-12 * double(n));
  }
}

TEST_CASE("fft matches unit vector identities") {
  std::vector<cplx> e0(4, cplx{});
  e0[0] = 1.0;
  const auto f = fft_apply(e0, FftDirection::forward);
  for (const auto& x : f) CHECK(std::abs(x - cplx(1, 0)) < 1e-15);
  const auto back = fft_apply(f, FftDirection::inverse);
  CHECK(std::abs(back[0] - cplx(1, 0)) < 1e-14);
  for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(back[i]) < 1e-14);
}

TEST_CASE("fft equals the naive transform") {
  Rng rng(1);
  for (std::size_t n : {2u, 8u, 16u, 129u, 1024u}) {
    const auto v = random_cvec(n, rng);
    const auto fast = fft_apply(v, FftDirection::forward);
    const auto slow = oracle::naive_dft(v);
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < n; ++i) {
      err += abs2(fast[i] - slow[i]);
      ref += abs2(slow[i]);
    }
    CHECK(std::sqrt(err) <= 1e-12 * std::sqrt(ref));
  }
}

TEST_CASE("fft inverse round trip and linearity") {
  Rng rng(2);
  for (std::size_t n : {16u, 64u}) {
    const auto u = random_cvec(n, rng);
    const auto v = random_cvec(n, rng);
    const auto round = fft_apply(fft_apply(u, FftDirection::forward), FftDirection::inverse);
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) err += abs2(round[i] - u[i]);
    CHECK(std::sqrt(err) <= 1e-13 * norm2(std::span<const cplx>(u)));

    const cplx alpha(0.3, -1.2), beta(-2.0, 0.7);
    std::vector<cplx> lin(n);
    for (std::size_t i = 0; i < n; ++i) lin[i] = alpha * u[i] + beta * v[i];
    const auto f_lin = fft_apply(lin, FftDirection::forward);
    const auto fu = fft_apply(u, FftDirection::forward);
    const auto fv = fft_apply(v, FftDirection::forward);
    double lerr = 0, lref = 0;
    for (std::size_t i = 0; i < n; ++i) {
      lerr += abs2(f_lin[i] - (alpha * fu[i] + beta * fv[i]));
      lref += abs2(f_lin[i]);
    }
    CHECK(std::sqrt(lerr) <= 1e-12 * std::sqrt(lref));
  }
}

TEST_CASE("fft parseval") {
  Rng rng(3);
  for (std::size_t n : {8u, 256u}) {
    const auto v = random_cvec(n, rng);
    const auto f = fft_apply(v, FftDirection::forward);
    CHECK(norm2(std::span<const cplx>(f)) ==
          doctest::Approx(std::sqrt(double(n)) * norm2(std::span<const cplx>(v))).epsilon(1e-12));
  }
}

TEST_CASE("ah base case is the 2x2 butterfly") {
  Rng rng(4);
  const auto t = build_recursive_transform(1, 1, TransformKind::ah, rng);
  const auto m = t.materialize<double>();
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(1, 1) == -1.0);

  std::vector<double> v{1.0, 0.0};
  const auto y = t.apply(std::span<const double>(v));
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 1.0);
}

TEST_CASE("ah depth-1 on 8 points has two nonzeros per row") {
  Rng rng(5);
  const auto t = build_recursive_transform(3, 1, TransformKind::ah, rng);
  const auto m = t.materialize<double>();
  for (std::size_t i = 0; i < 8; ++i) {
    std::size_t cnt = 0;
    for (std::size_t j = 0; j < 8; ++j)
      if (m(i, j) != 0.0) ++cnt;
    CHECK(cnt == 2);
  }
}

TEST_CASE("sparsity is exactly 2^d per row and column for every kind") {
  Rng rng(6);
  for (int k = 1; k <= 6; ++k) {
    for (int d = 1; d <= k; ++d) {
      for (const auto kind : kAllKinds) {
        const auto t = build_recursive_transform(k, d, kind, rng);
        const auto m = t.materialize<cplx>();
        const std::size_t n = std::size_t(1) << k;
        const std::size_t want = std::size_t(1) << d;
        for (std::size_t i = 0; i < n; ++i) {
          std::size_t row_cnt = 0, col_cnt = 0;
          for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(m(i, j)) > 1e-12) ++row_cnt;
            if (std::abs(m(j, i)) > 1e-12) ++col_cnt;
          }
          CHECK(row_cnt == want);
          CHECK(col_cnt == want);
        }
      }
    }
  }
}

TEST_CASE("scaled orthogonality for every kind") {
  Rng rng(7);
  for (int k = 1; k <= 6; ++k) {
    for (int d = 1; d <= k; ++d) {
      for (const auto kind : kAllKinds) {
        const auto t = build_recursive_transform(k, d, kind, rng);
        const auto m = t.materialize<cplx>();
        const std::size_t n = std::size_t(1) << k;
        const double scale = double(std::size_t(1) << d);
        const auto g = matmul(m.conj_transposed(), m);
        ComplexMatrix si(n, n);
        for (std::size_t i = 0; i < n; ++i) si(i, i) = scale;
        CHECK(frobenius_distance(g, si) <= 1e-10 * scale * std::sqrt(double(n)));
      }
    }
  }
}

TEST_CASE("phase-scaled hadamard kinds stay unitary up to scale") {
  Rng rng(8);
  const auto t = build_recursive_transform(4, 3, TransformKind::arsph, rng, DiagKind::phase);
  CHECK(!t.is_real());
  const auto m = t.materialize<cplx>();
  const auto g = matmul(m.conj_transposed(), m);
  ComplexMatrix si(16, 16);
  for (std::size_t i = 0; i < 16; ++i) si(i, i) = 8.0;
  CHECK(frobenius_distance(g, si) <= 1e-10 * 8.0 * 4.0);
}

TEST_CASE("af at full depth materializes to the dft up to the recorded row order") {
  Rng rng(9);
  for (int k : {1, 2, 3, 4}) {
    const auto t = build_recursive_transform(k, k, TransformKind::af, rng);
    const auto m = t.materialize<cplx>();
    const auto om = dft_matrix(std::size_t(1) << k);
    const auto& rec = t.row_record();
    double err = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        err += abs2(m(i, j) - om(std::size_t(rec[i]), j));
    CHECK(std::sqrt(err) <= 1e-12 * frobenius_norm(om));
  }
}

TEST_CASE("apply matches materialization") {
  Rng rng(10);
  for (const auto kind : {TransformKind::arsph, TransformKind::aspf, TransformKind::aph}) {
    const auto t = build_recursive_transform(4, 2, kind, rng);
    const auto m = t.materialize<cplx>();
    const auto v = random_cvec(16, rng);
    const auto fast = t.apply(std::span<const cplx>(v));
    const auto slow = matvec(m, v);
    double err = 0, ref = 0;
    for (std::size_t i = 0; i < 16; ++i) {
      err += abs2(fast[i] - slow[i]);
      ref += abs2(slow[i]);
    }
    CHECK(std::sqrt(err) <= 1e-12 * std::sqrt(ref));
  }
}

TEST_CASE("transpose apply matches materialization transpose") {
  Rng rng(11);
  for (const auto kind : kAllKinds) {
    const auto t = build_recursive_transform(3, 2, kind, rng);
    const auto mt = t.materialize<cplx>().transposed();
    const auto v = random_cvec(8, rng);
    const auto fast = t.apply_transpose(std::span<const cplx>(v));
    const auto slow = matvec(mt, v);
    double err = 0;
    for (std::size_t i = 0; i < 8; ++i) err += abs2(fast[i] - slow[i]);
    CHECK(std::sqrt(err) <= 1e-12 * norm2(std::span<const cplx>(slow)));
  }
}

TEST_CASE("zero vector maps to zero") {
  Rng rng(12);
  const auto t = build_recursive_transform(4, 2, TransformKind::arsph, rng);
  std::vector<double> z(16, 0.0);
  for (const double x : t.apply(std::span<const double>(z))) CHECK(x == 0.0);
}

TEST_CASE("hadamard flop counter stays within 3dn") {
  Rng rng(13);
  for (int k : {3, 5, 6}) {
    for (int d = 1; d <= k; ++d) {
      for (const auto kind : {TransformKind::arsph, TransformKind::arph, TransformKind::arsh,
                              TransformKind::ah, TransformKind::asph, TransformKind::ash,
                              TransformKind::aph}) {
        const auto t = build_recursive_transform(k, d, kind, rng);
        const std::size_t n = std::size_t(1) << k;
        std::vector<double> v(n, 1.0);
        FlopCount fc;
        t.apply(std::span<const double>(v), &fc);
        CHECK(fc.ops <= 3LL * d * (long long)n);
      }
    }
  }
}

TEST_CASE("random variable budget for levelwise kinds") {
  Rng rng(14);
  for (int k : {4, 6}) {
    for (int d = 1; d <= k; ++d) {
      const auto t = build_recursive_transform(k, d, TransformKind::arsph, rng);
      const long long expect =
          (long long)((1.0 - std::pow(0.5, d)) * double(1LL << (k + 3)) + 0.5);
      CHECK(t.random_variables() == expect);
    }
  }
}

TEST_CASE("bad depth is rejected") {
  Rng rng(15);
  CHECK_THROWS_AS(build_recursive_transform(3, 0, TransformKind::ah, rng), BadDepth);
  CHECK_THROWS_AS(build_recursive_transform(3, 4, TransformKind::ah, rng), BadDepth);
}

TEST_CASE("dimension mismatch is rejected") {
  Rng rng(16);
  const auto t = build_recursive_transform(3, 1, TransformKind::ah, rng);
  std::vector<double> v(7, 1.0);
  CHECK_THROWS_AS((void)t.apply(std::span<const double>(v)), DimensionMismatch);
}
