#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "genpx/bench.hpp"
#include "genpx/io.hpp"

namespace {

using namespace genpx;

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw IoError("cannot open '" + out_path + "' for writing");
  os << text;
}

double kappa_estimate(const MatrixVariant& mv) {
  return std::visit(
      [](const auto& a) -> double {
        const double smax = spectral_norm(a);
        try {
          const auto f = gepp_factor(a);
          using T = std::decay_t<decltype(a(0, 0))>;
          // inverse power iteration through the factors
          const double sinv = spectral_norm_power(
              a.rows(), a.rows(),
              [&](std::vector<cplx>& v) {
                std::vector<T> rhs(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                  if constexpr (is_complex_v<T>)
                    rhs[i] = v[i];
                  else
                    rhs[i] = v[i].real() + v[i].imag();
                }
                const auto s = lu_solve(f, std::span<const T>(rhs));
                for (std::size_t i = 0; i < v.size(); ++i) v[i] = s[i];
              },
              [&](std::vector<cplx>& v) {
                // (A^{-1})^H v  ==  conj(A^{-T} conj(v)); A^{-T} via right solve
                std::vector<T> rhs(v.size());
                Matrix<T> row(1, v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                  const cplx c = std::conj(v[i]);
                  if constexpr (is_complex_v<T>)
                    row(0, i) = c;
                  else
                    row(0, i) = c.real();
                }
                const auto y = lu_solve_right(f, row);
                for (std::size_t i = 0; i < v.size(); ++i) {
                  if constexpr (is_complex_v<T>)
                    v[i] = std::conj(y(0, i));
                  else
                    v[i] = y(0, i);
                }
              });
          return smax * sinv;
        } catch (const NumericFailure&) {
          return std::numeric_limits<double>::infinity();
        }
      },
      mv);
}

std::vector<double> to_real_vector(const MatrixVariant& mv, const char* what) {
  const auto* m = std::get_if<RealMatrix>(&mv);
  if (!m || m->cols() != 1) throw IoError(std::string(what) + ": expected a real column vector");
  std::vector<double> v(m->rows());
  for (std::size_t i = 0; i < m->rows(); ++i) v[i] = (*m)(i, 0);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pivot-free elimination with randomized pre-processing"};
  app.require_subcommand(1);

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "run a residual-statistics campaign");
  std::string cls = "blocked_ill";
  std::vector<std::size_t> ns;
  std::string mult_left = "none", mult_right = "none", border, format = "csv", out_path;
  int trials = -1, threads = 0;
  std::vector<int> refine = {0, 1};
  std::uint64_t seed = 1;
  double pivot_tol = 0.0;
  bench->add_option("--class", cls, "matrix class");
  bench->add_option("--n", ns, "matrix sizes (repeatable)")->required();
  bench->add_option("--mult-left", mult_left, "left multiplier spec");
  bench->add_option("--mult-right", mult_right, "right multiplier spec");
  bench->add_option("--border", border, "augmentation border gauss|srft|circ[:h=..,ratio=..]");
  bench->add_option("--trials", trials, "trials per size (default 1000, 10 for n >= 2048)");
  bench->add_option("--refine", refine, "refinement counts to report (repeatable)");
  bench->add_option("--seed", seed, "master seed");
  bench->add_option("--threads", threads, "worker threads (0 = auto)");
  bench->add_option("--pivot-tol", pivot_tol, "relative zero-pivot threshold inside pipelines");
  bench->add_option("--format", format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
  bench->add_option("--out", out_path, "output file (default stdout)");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "solve A x = b from matrix files");
  std::string matrix_file, rhs_file, sol_path = "x.mtx";
  std::string s_left = "none", s_right = "none", s_border;
  int s_refine = 1;
  std::uint64_t s_seed = 1;
  double s_pivot_tol = -1.0;  // < 0 selects the n*eps default
  solve->add_option("matrix", matrix_file, "matrix file")->required();
  solve->add_option("rhs", rhs_file, "right-hand side file")->required();
  solve->add_option("--pivot-tol", s_pivot_tol,
                    "relative zero-pivot threshold (default n*eps, 0 = exact zero only)");
  solve->add_option("--mult-left", s_left, "left multiplier spec or none");
  solve->add_option("--mult-right", s_right, "right multiplier spec or none");
  solve->add_option("--border", s_border, "augmentation border spec");
  solve->add_option("--refine", s_refine, "refinement iterations");
  solve->add_option("--seed", s_seed, "seed for randomized pre-processing");
  solve->add_option("--out", sol_path, "solution output file");

  // ---- genmat ----
  auto* genmat = app.add_subcommand("genmat", "generate a benchmark matrix");
  std::string g_tag = "blocked_ill", g_out;
  std::size_t g_n = 64;
  std::uint64_t g_seed = 1;
  genmat->add_option("--class", g_tag, "matrix class")->required();
  genmat->add_option("--n", g_n, "size")->required();
  genmat->add_option("--seed", g_seed, "seed");
  genmat->add_option("--out", g_out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*bench) {
      ExperimentConfig cfg;
      cfg.matrix_class = parse_gallery_tag(cls);
      cfg.ns = ns;
      cfg.mult_left = mult_left;
      cfg.mult_right = mult_right;
      if (!border.empty()) cfg.border = parse_border_spec(border);
      cfg.trials = trials;
      cfg.refine_iters = refine;
      cfg.seed = seed;
      cfg.threads = threads;
      cfg.pivot_tol = pivot_tol;
      const auto report = run_bench(cfg);
      emit(format == "csv" ? render_csv(report) : render_markdown(report), out_path);
      return 0;
    }

    if (*solve) {
      const MatrixVariant av = read_matrix_file(matrix_file);
      const MatrixVariant bv = read_matrix_file(rhs_file);
      Rng rng(s_seed);

      const std::size_t n = std::visit([](const auto& m) { return m.rows(); }, av);
      std::optional<Multiplier> left, right;
      if (s_left != "none" && !s_left.empty()) left.emplace(make_from_spec(s_left, n, rng));
      if (s_right != "none" && !s_right.empty()) right.emplace(make_from_spec(s_right, n, rng));

      BorderSpec bs;
      if (!s_border.empty()) bs = parse_border_spec(s_border);
      SolveOptions sopt;
      sopt.pivot_tol =
          s_pivot_tol >= 0 ? s_pivot_tol : double(n) * std::numeric_limits<double>::epsilon();

      const bool complex_mode = std::holds_alternative<ComplexMatrix>(av) ||
                                std::holds_alternative<ComplexMatrix>(bv) ||
                                (left && !left->is_real()) || (right && !right->is_real()) ||
                                (bs.h > 0 && bs.kind == BorderKind::srft);
      PipelineDiagnostics diag;
      if (complex_mode) {
        const ComplexMatrix a = std::holds_alternative<ComplexMatrix>(av)
                                    ? std::get<ComplexMatrix>(av)
                                    : promote(std::get<RealMatrix>(av));
        std::vector<cplx> b;
        if (const auto* bm = std::get_if<ComplexMatrix>(&bv)) {
          if (bm->cols() != 1) throw IoError("rhs: expected a column vector");
          for (std::size_t i = 0; i < bm->rows(); ++i) b.push_back((*bm)(i, 0));
        } else {
          for (const double x : to_real_vector(bv, "rhs")) b.push_back(x);
        }
        PipelineResult<cplx> res;
        if (bs.h > 0)
          res = augmented_solve<cplx>(a, b, bs.h, bs.kind, rng, s_refine, bs.ratio, sopt);
        else
          res = solve_preprocessed<cplx>(a, b, left ? &*left : nullptr,
                                         right ? &*right : nullptr, s_refine, sopt);
        write_vector_file(sol_path, res.x);
        diag = res.diag;
      } else {
        const RealMatrix& a = std::get<RealMatrix>(av);
        const auto b = to_real_vector(bv, "rhs");
        PipelineResult<double> res;
        if (bs.h > 0)
          res = augmented_solve<double>(a, b, bs.h, bs.kind, rng, s_refine, bs.ratio, sopt);
        else
          res = solve_preprocessed<double>(a, b, left ? &*left : nullptr,
                                           right ? &*right : nullptr, s_refine, sopt);
        write_vector_file(sol_path, res.x);
        diag = res.diag;
      }
      double min_pivot = std::numeric_limits<double>::infinity();
      for (const double p : diag.pivot_mags) min_pivot = std::min(min_pivot, p);
      std::cout << "solution: " << sol_path << "\n";
      std::cout << "min |pivot|: " << min_pivot << "\n";
      for (std::size_t j = 0; j < diag.residual_by_iter.size(); ++j)
        std::cout << "relative residual after " << j << " refinement(s): "
                  << diag.residual_by_iter[j] << "\n";
      return 0;
    }

    if (*genmat) {
      Rng rng(g_seed);
      const MatrixVariant m = gen_benchmark(parse_gallery_tag(g_tag), g_n, rng);
      write_matrix_file(g_out, m);
      std::cout << "wrote " << g_out << "\n";
      std::cout << "kappa estimate: " << kappa_estimate(m) << "\n";
      return 0;
    }
  } catch (const StageError& e) {
    std::cerr << "numerical failure at stage '" << e.stage << "': " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NumericFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
