#include "genpx/stats.hpp"

#include <algorithm>
#include <cmath>

namespace genpx {

namespace {

// Neumaier compensated sum
double compensated_sum(const std::vector<double>& xs, double shift = 0.0) {
  double s = 0, c = 0;
  for (double raw : xs) {
    const double x = raw - shift;
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace

void StatsAccumulator::add(double residual) {
  if (!std::isfinite(residual)) {
    ++failures_;
    return;
  }
  values_.push_back(residual);
}

void StatsAccumulator::add_failure() { ++failures_; }

ResidualStats StatsAccumulator::finalize() const {
  ResidualStats r;
  r.failures = failures_;
  r.trials = (long long)values_.size();
  if (values_.empty()) return r;
  r.mean = compensated_sum(values_) / double(values_.size());
  r.min = *std::min_element(values_.begin(), values_.end());
  r.max = *std::max_element(values_.begin(), values_.end());
  if (values_.size() > 1) {
    std::vector<double> sq(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double d = values_[i] - r.mean;
      sq[i] = d * d;
    }
    r.stddev = std::sqrt(compensated_sum(sq) / double(values_.size() - 1));
  }
  return r;
}

}  // namespace genpx
