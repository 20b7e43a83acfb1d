#pragma once

#include <variant>

#include "genpx/fft.hpp"
#include "genpx/matrix.hpp"
#include "genpx/rng.hpp"

namespace genpx {

struct BadTag : std::invalid_argument {
  explicit BadTag(const std::string& what) : std::invalid_argument(what) {}
};

enum class GalleryTag { blocked_ill, circul, condex, fiedler, orthog, randcorr, toeppd, dft };

GalleryTag parse_gallery_tag(const std::string& name);
const char* gallery_tag_name(GalleryTag tag);

// T = (t_{i-j}); m + n - 1 i.i.d. Gaussian parameters, first column then the
// rest of the first row
RealMatrix gaussian_toeplitz(std::size_t m, std::size_t n, Rng& rng);

// the 2x2-blocked matrix with a rank-deficient leading block: the leading
// k x k block has k-4 unit singular values and 4 zero ones, the other blocks
// are Gaussian Toeplitz scaled to unit spectral norm
RealMatrix gen_blocked_ill(std::size_t n, Rng& rng);

RealMatrix gen_gallery(GalleryTag tag, std::size_t n, Rng& rng);

ComplexMatrix gen_dft_input(std::size_t n);

// parametrized toeppd: sum of w_t * (cos(2 pi (i-j) theta_t))
RealMatrix gen_toeppd(std::size_t n, const std::vector<double>& w,
                      const std::vector<double>& theta);

// explicit Q from Householder QR of a square real matrix
RealMatrix householder_orthogonal(const RealMatrix& a);

using MatrixVariant = std::variant<RealMatrix, ComplexMatrix>;

MatrixVariant gen_benchmark(GalleryTag tag, std::size_t n, Rng& rng);

}  // namespace genpx
