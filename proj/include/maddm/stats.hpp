#pragma once

#include <cstddef>
#include <span>

namespace maddm {

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample
  double p = 1.0;  // two-sided
};

/// Two-sided Mann-Whitney rank-sum test. Small tie-free samples (both below
/// 20) use the exact null distribution; otherwise the normal approximation
/// with tie and continuity correction. Identical pooled values give p = 1.
/// Throws std::invalid_argument on an empty sample.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Exact two-sided p-value of U for tie-free samples of sizes n and m.
double mann_whitney_exact_p(double u, std::size_t n, std::size_t m);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  double ci_low = 0.0;
  double ci_high = 0.0;  // normal 95% interval of the mean
};

SampleSummary summarize(std::span<const double> values);

}  // namespace maddm
