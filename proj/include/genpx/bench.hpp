#pragma once

#include <cstdint>
#include <string>

#include "genpx/genmat.hpp"
#include "genpx/preprocess.hpp"
#include "genpx/stats.hpp"

namespace genpx {

struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

struct BorderSpec {
  BorderKind kind = BorderKind::gaussian;
  std::size_t h = 0;  // 0 = no augmentation
  double ratio = 2.0; // ||A|| / ||U V^T||
};

struct ExperimentConfig {
  GalleryTag matrix_class = GalleryTag::blocked_ill;
  std::vector<std::size_t> ns;
  std::string mult_left = "none";
  std::string mult_right = "none";
  BorderSpec border;              // used when border.h > 0
  int trials = -1;                // -1 = 1000, or 10 for n >= 2048
  std::vector<int> refine_iters = {0, 1};
  std::uint64_t seed = 1;
  int threads = 0;                // 0 = hardware concurrency
  double pivot_tol = 0.0;
};

struct BenchRow {
  std::size_t n = 0;
  int iterations = 0;
  ResidualStats stats;
};

struct FailureNote {
  std::size_t n = 0;
  long long trial = 0;
  std::string stage;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<FailureNote> failures;
};

int default_trials(std::size_t n);

// one row per (n, refine_iters); deterministic for a fixed seed, independent
// of the thread count
BenchReport run_bench(const ExperimentConfig& config);

std::string render_csv(const BenchReport& report);
std::string render_markdown(const BenchReport& report);

// multiplier mini-language, e.g. "gauss", "circ:f=1", "arsph:d=3,kind=apf",
// "sparsecirc:q=10", "combo:sum(apf:d=3,bidiaginv:diag=101,scale=pow2)"
Multiplier make_from_spec(const std::string& spec, std::size_t n, Rng& rng);

// border flag syntax "gauss|srft|circ[:h=<k>][,ratio=<r>]"
BorderSpec parse_border_spec(const std::string& text);

// per-trial outcome of one pipeline run: residuals for refine counts 0..max
struct TrialOutcome {
  std::vector<double> residuals;
  bool failed = false;
  std::string stage;
};

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t n, std::uint64_t trial_seed,
                       int max_refine);

}  // namespace genpx
