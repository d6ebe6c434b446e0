#include "maddm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace maddm {

namespace {

constexpr std::size_t kExactLimit = 20;

}  // namespace

double mann_whitney_exact_p(double u, std::size_t n, std::size_t m) {
  const std::size_t max_u = n * m;
  // Arrangement counts f[i][j][u] via the recurrence f(i,j,u) = f(i-1,j,u-j) + f(i,j-1,u).
  std::vector<std::vector<std::vector<double>>> f(
      n + 1, std::vector<std::vector<double>>(m + 1, std::vector<double>(max_u + 1, 0.0)));
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 || j == 0) {
        f[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t k = 0; k <= i * j; ++k) {
        double v = f[i][j - 1][k];
        if (k >= j) v += f[i - 1][j][k - j];
        f[i][j][k] = v;
      }
    }
  }
  const auto& dist = f[n][m];
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  double below = 0.0;
  double above = 0.0;
  for (std::size_t k = 0; k <= max_u; ++k) {
    const double kd = static_cast<double>(k);
    if (kd <= u + 1e-9) below += dist[k];
    if (kd >= u - 1e-9) above += dist[k];
  }
  return std::min(1.0, 2.0 * std::min(below, above) / total);
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("Mann-Whitney needs non-empty samples");
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t n = na + nb;

  struct Item {
    double value;
    bool first;
  };
  std::vector<Item> pooled;
  pooled.reserve(n);
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Item& x, const Item& y) { return x.value < y.value; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].value == pooled[i].value) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].first) rank_sum_a += midrank;
    }
    if (t > 1.0) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }

  const double dna = static_cast<double>(na);
  const double dnb = static_cast<double>(nb);
  const double dn = static_cast<double>(n);
  MannWhitneyResult out;
  out.u = rank_sum_a - dna * (dna + 1.0) / 2.0;

  if (pooled.front().value == pooled.back().value) {
    out.p = 1.0;
    return out;
  }
  if (!ties && na < kExactLimit && nb < kExactLimit) {
    out.p = mann_whitney_exact_p(out.u, na, nb);
    return out;
  }
  const double mu = dna * dnb / 2.0;
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    out.p = 1.0;
    return out;
  }
  const double z = std::max(0.0, std::abs(out.u - mu) - 0.5) / std::sqrt(var);
  out.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  const double half = 1.96 * s.std / std::sqrt(static_cast<double>(s.n));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

}  // namespace maddm
