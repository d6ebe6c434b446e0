#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "maddm/random.hpp"
#include "maddm/stats.hpp"
#include "oracles.hpp"

using namespace maddm;

TEST_CASE("exact distribution matches enumeration for n = m = 5") {
  for (std::size_t u = 0; u <= 25; ++u) {
    CAPTURE(u);
    CHECK(std::abs(mann_whitney_exact_p(static_cast<double>(u), 5, 5) -
                   oracle::mann_whitney_exact_enumerated(u, 5, 5)) < 1e-9);
  }
  // Unequal sizes as well.
  for (std::size_t u = 0; u <= 12; ++u) {
    CHECK(std::abs(mann_whitney_exact_p(static_cast<double>(u), 3, 4) -
                   oracle::mann_whitney_exact_enumerated(u, 3, 4)) < 1e-9);
  }
}

TEST_CASE("small tie-free samples take the exact path") {
  RandomSource rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> all(10);
    std::iota(all.begin(), all.end(), 1.0);
    std::shuffle(all.begin(), all.end(), rng.engine());
    const std::vector<double> a(all.begin(), all.begin() + 5);
    const std::vector<double> b(all.begin() + 5, all.end());
    const auto r = mann_whitney_u(a, b);
    std::size_t u = 0;
    for (double x : a) {
      for (double y : b) u += x > y;
    }
    CHECK(r.u == static_cast<double>(u));
    CHECK(std::abs(r.p - oracle::mann_whitney_exact_enumerated(u, 5, 5)) < 1e-9);
  }
}

TEST_CASE("mann whitney examples") {
  std::vector<double> a(50);
  std::vector<double> b(50);
  std::iota(a.begin(), a.end(), 1.0);
  std::iota(b.begin(), b.end(), 51.0);
  const auto disjoint = mann_whitney_u(a, b);
  CHECK(disjoint.u == 0.0);
  CHECK(disjoint.p < 1e-9);

  const auto same = mann_whitney_u(a, a);
  CHECK(same.u == 50.0 * 50.0 / 2.0);
  CHECK(same.p == doctest::Approx(1.0));

  auto shuffled = a;
  RandomSource rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
  CHECK(mann_whitney_u(a, shuffled).u == 1250.0);

  const std::vector<double> flat(7, 3.0);
  CHECK(mann_whitney_u(flat, flat).p == 1.0);

  CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, a), std::invalid_argument);
}

TEST_CASE("p-values are valid probabilities and symmetric") {
  RandomSource rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a(1 + rng.index(30));
    std::vector<double> b(1 + rng.index(30));
    // Rounded values so that ties occur.
    for (auto& x : a) x = std::round(10.0 * rng.normal(0.0, 1.0));
    for (auto& x : b) x = std::round(10.0 * rng.normal(0.3, 1.0));
    const auto ab = mann_whitney_u(a, b);
    const auto ba = mann_whitney_u(b, a);
    CHECK(ab.p >= 0.0);
    CHECK(ab.p <= 1.0);
    CHECK(ab.u + ba.u == doctest::Approx(static_cast<double>(a.size() * b.size())));
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
  }
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize(v);
  CHECK(s.n == 8);
  CHECK(s.mean == 5.0);
  CHECK(s.std == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(s.ci_low == doctest::Approx(5.0 - 1.96 * s.std / std::sqrt(8.0)));
  CHECK(s.ci_high == doctest::Approx(5.0 + 1.96 * s.std / std::sqrt(8.0)));
  const auto one = summarize(std::vector<double>{3.0});
  CHECK(one.std == 0.0);
  CHECK(one.ci_low == 3.0);
}
