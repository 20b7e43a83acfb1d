#pragma once

#include <cstdint>
#include <vector>

namespace genpx {

struct ResidualStats {
  long long trials = 0;    // successful trials entering the moments
  long long failures = 0;  // pipeline errors / non-finite residuals
  double mean = 0;
  double max = 0;
  double min = 0;
  double stddev = 0;
};

// Residual aggregation. Values are kept and reduced in insertion order with
// compensated sums, so a parallel campaign that stores per-trial slots first
// reduces to the same bytes as a serial one.
class StatsAccumulator {
 public:
  void add(double residual);
  void add_failure();
  ResidualStats finalize() const;

 private:
  std::vector<double> values_;
  long long failures_ = 0;
};

}  // namespace genpx
