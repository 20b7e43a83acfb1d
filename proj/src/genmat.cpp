#include "genpx/genmat.hpp"

#include <numbers>

#include "genpx/multiplier.hpp"
#include "genpx/svd.hpp"

namespace genpx {

GalleryTag parse_gallery_tag(const std::string& name) {
  if (name == "blocked_ill") return GalleryTag::blocked_ill;
  if (name == "circul") return GalleryTag::circul;
  if (name == "condex") return GalleryTag::condex;
  if (name == "fiedler") return GalleryTag::fiedler;
  if (name == "orthog") return GalleryTag::orthog;
  if (name == "randcorr") return GalleryTag::randcorr;
  if (name == "toeppd") return GalleryTag::toeppd;
  if (name == "dft") return GalleryTag::dft;
  throw BadTag("unknown matrix class '" + name + "'");
}

const char* gallery_tag_name(GalleryTag tag) {
  switch (tag) {
    case GalleryTag::blocked_ill: return "blocked_ill";
    case GalleryTag::circul: return "circul";
    case GalleryTag::condex: return "condex";
    case GalleryTag::fiedler: return "fiedler";
    case GalleryTag::orthog: return "orthog";
    case GalleryTag::randcorr: return "randcorr";
    case GalleryTag::toeppd: return "toeppd";
    case GalleryTag::dft: return "dft";
  }
  return "?";
}

RealMatrix gaussian_toeplitz(std::size_t m, std::size_t n, Rng& rng) {
  if (m < 1 || n < 1) throw BadSize("gaussian_toeplitz: empty shape");
  // diagonals t_d for d = -(n-1) .. m-1; first column then rest of first row
  std::vector<double> t(m + n - 1);
  for (std::size_t i = 0; i < m; ++i) t[(n - 1) + i] = rng.gaussian();
  for (std::size_t j = 1; j < n; ++j) t[(n - 1) - j] = rng.gaussian();
  RealMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = t[(n - 1) + i - j];
  return a;
}

namespace {

// W -= (2/vtv) v (v^T W) on rows k.., with row-contiguous passes
void apply_reflector(RealMatrix& w, const std::vector<double>& v, std::size_t k, double vtv,
                     std::vector<double>& scratch) {
  const std::size_t n = w.rows(), cols = w.cols();
  scratch.assign(cols, 0.0);
  for (std::size_t i = k; i < n; ++i) {
    const double vi = v[i - k];
    const double* wi = w.row(i);
    for (std::size_t j = 0; j < cols; ++j) scratch[j] += vi * wi[j];
  }
  const double beta = 2.0 / vtv;
  for (std::size_t i = k; i < n; ++i) {
    const double s = beta * v[i - k];
    double* wi = w.row(i);
    for (std::size_t j = 0; j < cols; ++j) wi[j] -= s * scratch[j];
  }
}

}  // namespace

RealMatrix householder_orthogonal(const RealMatrix& a) {
  const std::size_t n = a.rows();
  RealMatrix r = a;
  std::vector<std::vector<double>> vs(n);
  std::vector<double> scratch;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(n - k);
    double nrm2 = 0;
    for (std::size_t i = k; i < n; ++i) {
      v[i - k] = r(i, k);
      nrm2 += v[i - k] * v[i - k];
    }
    const double nrm = std::sqrt(nrm2);
    if (nrm == 0) continue;
    v[0] += (v[0] >= 0 ? nrm : -nrm);
    double vtv = 0;
    for (double x : v) vtv += x * x;
    if (vtv == 0) continue;
    apply_reflector(r, v, k, vtv, scratch);
    vs[k] = std::move(v);
  }
  // accumulate Q = H_0 H_1 ... H_{n-1} applied to the identity, backwards
  RealMatrix q = RealMatrix::identity(n);
  for (std::size_t kk = n; kk > 0; --kk) {
    const std::size_t k = kk - 1;
    const auto& v = vs[k];
    if (v.empty()) continue;
    double vtv = 0;
    for (double x : v) vtv += x * x;
    apply_reflector(q, v, k, vtv, scratch);
  }
  return q;
}

RealMatrix gen_blocked_ill(std::size_t n, Rng& rng) {
  if (n % 2 != 0 || n / 2 < 5) throw BadSize("blocked_ill: need even n with n/2 >= 5");
  const std::size_t k = n / 2;

  RealMatrix g1(k, k), g2(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g1(i, j) = rng.gaussian();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) g2(i, j) = rng.gaussian();
  const RealMatrix q1 = householder_orthogonal(g1);
  const RealMatrix q2 = householder_orthogonal(g2);

  // A_k = Q1 diag(1,...,1,0,0,0,0) Q2^T: product of the first k-4 columns
  const std::size_t r = k - 4;
  const RealMatrix ak = matmul(q1.block(0, 0, k, r), q2.block(0, 0, k, r).transposed());

  auto unit_norm_toeplitz = [&]() {
    RealMatrix t = gaussian_toeplitz(k, k, rng);
    const double nrm = spectral_norm(t, 1e-6);
    if (nrm > 0) t *= 1.0 / nrm;
    return t;
  };
  const RealMatrix b = unit_norm_toeplitz();
  const RealMatrix c = unit_norm_toeplitz();
  const RealMatrix d = unit_norm_toeplitz();

  RealMatrix a(n, n);
  a.set_block(0, 0, ak);
  a.set_block(0, k, b);
  a.set_block(k, 0, c);
  a.set_block(k, k, d);
  return a;
}

namespace {

RealMatrix gen_circul(std::size_t n, Rng& rng) {
  const auto row = rng.gaussian_vector(n);
  RealMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = row[(j + n - i) % n];
  return a;
}

// counter-example to condition estimators: I + theta * P with P the projector
// onto the complement of a fixed 3-dimensional subspace
RealMatrix gen_condex(std::size_t n, double theta = 100.0) {
  if (n < 4) throw BadSize("condex: need n >= 4");
  RealMatrix x(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = i == 0 ? 1.0 : 0.0;
    x(i, 2) = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + double(i) / double(n - 1));
  }
  // orthonormalize the three columns
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t t = 0; t < j; ++t) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += x(i, t) * x(i, j);
      for (std::size_t i = 0; i < n; ++i) x(i, j) -= dot * x(i, t);
    }
    double nrm = 0;
    for (std::size_t i = 0; i < n; ++i) nrm += x(i, j) * x(i, j);
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) x(i, j) /= nrm;
  }
  RealMatrix a = RealMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double qq = 0;
      for (std::size_t t = 0; t < 3; ++t) qq += x(i, t) * x(j, t);
      a(i, j) += theta * ((i == j ? 1.0 : 0.0) - qq);
    }
  return a;
}

RealMatrix gen_fiedler(std::size_t n, Rng& rng) {
  const auto c = rng.gaussian_vector(n);
  RealMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = std::abs(c[i] - c[j]);
  return a;
}

RealMatrix gen_orthog(std::size_t n) {
  RealMatrix a(n, n);
  const double s = std::sqrt(2.0 / double(n + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = s * std::sin(double((i + 1) * (j + 1)) * std::numbers::pi / double(n + 1));
  return a;
}

// random correlation matrix: uniform eigenvalues rescaled to sum n, random
// orthogonal similarity, then Givens rotations push every diagonal entry to 1
RealMatrix gen_randcorr(std::size_t n, Rng& rng) {
  std::vector<double> lambda(n);
  double sum = 0;
  for (auto& l : lambda) {
    l = rng.u01();
    sum += l;
  }
  for (auto& l : lambda) l *= double(n) / sum;

  RealMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  const RealMatrix q = householder_orthogonal(g);
  RealMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t t = 0; t < n; ++t) s += q(i, t) * lambda[t] * q(j, t);
      a(i, j) = s;
    }

  const double tol = 1e-13;
  for (std::size_t pass = 0; pass < n; ++pass) {
    std::ptrdiff_t lo = -1, hi = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (a(i, i) < 1.0 - tol && lo < 0) lo = std::ptrdiff_t(i);
      if (a(i, i) > 1.0 + tol && hi < 0) hi = std::ptrdiff_t(i);
    }
    if (lo < 0 || hi < 0) break;
    const std::size_t i = std::size_t(lo), j = std::size_t(hi);
    const double aii = a(i, i), ajj = a(j, j), aij = a(i, j);
    const double disc = std::sqrt(std::max(0.0, aij * aij - (aii - 1.0) * (ajj - 1.0)));
    double t;
    if (ajj - 1.0 != 0.0) {
      const double t1 = (aij + disc) / (ajj - 1.0);
      const double t2 = (aij - disc) / (ajj - 1.0);
      t = std::abs(t1) < std::abs(t2) ? t1 : t2;
    } else {
      t = (aii - 1.0) / (2.0 * aij);
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
    for (std::size_t col = 0; col < n; ++col) {
      const double ri = a(i, col), rj = a(j, col);
      a(i, col) = c * ri - s * rj;
      a(j, col) = s * ri + c * rj;
    }
    for (std::size_t row = 0; row < n; ++row) {
      const double ci = a(row, i), cj = a(row, j);
      a(row, i) = c * ci - s * cj;
      a(row, j) = s * ci + c * cj;
    }
    a(i, i) = 1.0;
    for (std::size_t t2 = 0; t2 < n; ++t2) {
      const double avg = 0.5 * (a(i, t2) + a(t2, i));
      a(i, t2) = avg;
      a(t2, i) = avg;
    }
  }
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
  return a;
}

}  // namespace

RealMatrix gen_toeppd(std::size_t n, const std::vector<double>& w,
                      const std::vector<double>& theta) {
  if (w.size() != theta.size() || w.empty())
    throw BadParam("toeppd: weights and angles must pair up");
  RealMatrix a(n, n);
  for (std::size_t t = 0; t < w.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) += w[t] * std::cos(2.0 * std::numbers::pi * (double(i) - double(j)) * theta[t]);
  }
  return a;
}

RealMatrix gen_gallery(GalleryTag tag, std::size_t n, Rng& rng) {
  if (n < 2) throw BadSize("gen_gallery: need n >= 2");
  switch (tag) {
    case GalleryTag::blocked_ill: return gen_blocked_ill(n, rng);
    case GalleryTag::circul: return gen_circul(n, rng);
    case GalleryTag::condex: return gen_condex(n);
    case GalleryTag::fiedler: return gen_fiedler(n, rng);
    case GalleryTag::orthog: return gen_orthog(n);
    case GalleryTag::randcorr: return gen_randcorr(n, rng);
    case GalleryTag::toeppd: {
      const std::size_t m = n;
      std::vector<double> w(m), th(m);
      for (auto& x : w) x = rng.u01();
      for (auto& x : th) x = rng.gaussian();
      return gen_toeppd(n, w, th);
    }
    case GalleryTag::dft: break;
  }
  throw BadTag("gen_gallery: 'dft' is complex; use gen_dft_input");
}

ComplexMatrix gen_dft_input(std::size_t n) {
  if (n < 2) throw BadSize("gen_dft_input: need n >= 2");
  return dft_matrix(n);
}

MatrixVariant gen_benchmark(GalleryTag tag, std::size_t n, Rng& rng) {
  if (tag == GalleryTag::dft) return gen_dft_input(n);
  return gen_gallery(tag, n, rng);
}

}  // namespace genpx
