#include "genpx/bench.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

namespace genpx {

int default_trials(std::size_t n) { return n >= 2048 ? 10 : 1000; }

namespace {

std::uint64_t trial_seed_for(std::uint64_t master, std::size_t n, long long trial) {
  const std::uint64_t per_n = Rng::derive(master, (std::uint64_t)n * 0x51ed270b269b1badULL);
  return Rng::derive(per_n, (std::uint64_t)trial);
}

template <typename T>
std::vector<T> gaussian_rhs(std::size_t n, Rng& rng) {
  std::vector<T> b(n);
  for (auto& x : b) x = T(rng.gaussian());
  return b;
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t n, std::uint64_t trial_seed,
                       int max_refine) {
  TrialOutcome out;
  Rng rng(trial_seed);
  SolveOptions opt;
  opt.pivot_tol = config.pivot_tol;
  try {
    const MatrixVariant av = gen_benchmark(config.matrix_class, n, rng);
    const auto b = gaussian_rhs<double>(n, rng);

    std::optional<Multiplier> left, right;
    if (config.mult_left != "none" && !config.mult_left.empty())
      left.emplace(make_from_spec(config.mult_left, n, rng));
    if (config.mult_right != "none" && !config.mult_right.empty())
      right.emplace(make_from_spec(config.mult_right, n, rng));

    const bool complex_mode = std::holds_alternative<ComplexMatrix>(av) ||
                              (left && !left->is_real()) || (right && !right->is_real()) ||
                              (config.border.h > 0 && config.border.kind == BorderKind::srft);

    PipelineDiagnostics diag;
    if (complex_mode) {
      const ComplexMatrix a = std::holds_alternative<ComplexMatrix>(av)
                                  ? std::get<ComplexMatrix>(av)
                                  : promote(std::get<RealMatrix>(av));
      const std::vector<cplx> bc(b.begin(), b.end());
      if (config.border.h > 0) {
        diag = augmented_solve<cplx>(a, bc, config.border.h, config.border.kind, rng, max_refine,
                                     config.border.ratio, opt)
                   .diag;
      } else {
        diag = solve_preprocessed<cplx>(a, bc, left ? &*left : nullptr,
                                        right ? &*right : nullptr, max_refine, opt)
                   .diag;
      }
    } else {
      const RealMatrix& a = std::get<RealMatrix>(av);
      if (config.border.h > 0) {
        diag = augmented_solve<double>(a, b, config.border.h, config.border.kind, rng, max_refine,
                                       config.border.ratio, opt)
                   .diag;
      } else {
        diag = solve_preprocessed<double>(a, b, left ? &*left : nullptr,
                                          right ? &*right : nullptr, max_refine, opt)
                   .diag;
      }
    }
    out.residuals = diag.residual_by_iter;
  } catch (const StageError& e) {
    out.failed = true;
    out.stage = e.stage;
  } catch (const NumericFailure& e) {
    out.failed = true;
    out.stage = e.what();
  }
  return out;
}

BenchReport run_bench(const ExperimentConfig& config) {
  if (config.ns.empty()) throw ConfigError("no matrix sizes requested");
  if (config.refine_iters.empty()) throw ConfigError("no refinement counts requested");
  if (config.border.h > 0 &&
      ((config.mult_left != "none" && !config.mult_left.empty()) ||
       (config.mult_right != "none" && !config.mult_right.empty())))
    throw ConfigError("augmentation borders and multipliers are separate pipelines; pick one");
  for (int it : config.refine_iters)
    if (it < 0) throw ConfigError("negative refinement count");
  // surface size/family conflicts before any worker thread sees them
  for (const std::size_t n : config.ns) {
    Rng probe(0);
    try {
      if (config.mult_left != "none" && !config.mult_left.empty())
        (void)make_from_spec(config.mult_left, n, probe);
      if (config.mult_right != "none" && !config.mult_right.empty())
        (void)make_from_spec(config.mult_right, n, probe);
      if (config.border.h > n) throw BadSize("border wider than the matrix");
    } catch (const std::invalid_argument& e) {
      throw ConfigError("n = " + std::to_string(n) + ": " + e.what());
    }
  }
  const int max_refine = *std::max_element(config.refine_iters.begin(), config.refine_iters.end());

  BenchReport report;
  for (const std::size_t n : config.ns) {
    const long long trials = config.trials > 0 ? config.trials : default_trials(n);
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));

    int threads = config.threads > 0 ? config.threads
                                     : int(std::max(1u, std::thread::hardware_concurrency()));
    // keep the per-thread working set sane on big sizes
    const double bytes_per_trial = 40.0 * double(n) * double(n);
    const int mem_cap = std::max(1, int(2.5e9 / std::max(bytes_per_trial, 1.0)));
    threads = std::min({threads, mem_cap, int(trials)});

    if (threads <= 1) {
      for (long long t = 0; t < trials; ++t)
        outcomes[std::size_t(t)] = run_trial(config, n, trial_seed_for(config.seed, n, t), max_refine);
    } else {
      std::atomic<long long> next{0};
      std::vector<std::thread> pool;
      pool.reserve(std::size_t(threads));
      for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
          for (;;) {
            const long long t = next.fetch_add(1);
            if (t >= trials) return;
            outcomes[std::size_t(t)] =
                run_trial(config, n, trial_seed_for(config.seed, n, t), max_refine);
          }
        });
      }
      for (auto& th : pool) th.join();
    }

    for (const int iters : config.refine_iters) {
      StatsAccumulator acc;
      for (long long t = 0; t < trials; ++t) {
        const auto& o = outcomes[std::size_t(t)];
        if (o.failed) {
          acc.add_failure();
          continue;
        }
        acc.add(o.residuals[std::size_t(iters)]);  // non-finite counts as failure
      }
      report.rows.push_back({n, iters, acc.finalize()});
    }
    for (long long t = 0; t < trials; ++t) {
      if (outcomes[std::size_t(t)].failed)
        report.failures.push_back({n, t, outcomes[std::size_t(t)].stage});
    }
  }
  return report;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6e", x);
  return buf;
}

}  // namespace

std::string render_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "n,iterations,mean,max,min,std,failures\n";
  for (const auto& r : report.rows) {
    os << r.n << ',' << r.iterations << ',' << fmt(r.stats.mean) << ',' << fmt(r.stats.max) << ','
       << fmt(r.stats.min) << ',' << fmt(r.stats.stddev) << ',' << r.stats.failures << '\n';
  }
  return os.str();
}

std::string render_markdown(const BenchReport& report) {
  std::ostringstream os;
  os << "| n | iterations | mean | max | min | std | failures |\n";
  os << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    os << "| " << r.n << " | " << r.iterations << " | " << fmt(r.stats.mean) << " | "
       << fmt(r.stats.max) << " | " << fmt(r.stats.min) << " | " << fmt(r.stats.stddev) << " | "
       << r.stats.failures << " |\n";
  }
  return os.str();
}

}  // namespace genpx
