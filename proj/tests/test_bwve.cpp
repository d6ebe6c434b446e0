#include <cmath>
#include <vector>

#include "doctest.h"
#include "maddm/bwve.hpp"
#include "oracles.hpp"

using namespace maddm;
using oracle::Rational;

namespace {

// Records whose trustworthiness is exactly a small fraction.
struct Level {
  TrustRecord record;
  Rational tau;
  Rational theta;
};

const std::vector<Level>& levels() {
  static const std::vector<Level> l = {
      {{1, 9}, Rational(1, 10), Rational(1, 5)},
      {{1, 3}, Rational(1, 4), Rational(1, 2)},
      {{1, 1}, Rational(1, 2), Rational(1)},
      {{3, 1}, Rational(3, 4), Rational(1, 2)},
      {{9, 1}, Rational(9, 10), Rational(1, 5)},
  };
  return l;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

// Builds the trust vector and answer set for a list of (level, positive).
void build(const std::vector<std::pair<int, bool>>& spec, TrustVector& trust, AnswerSet& answers,
           std::vector<oracle::ExactVote>& exact) {
  std::vector<TrustRecord> records;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& lv = levels()[spec[i].first];
    records.push_back(lv.record);
    answers.add(i, spec[i].second ? Answer::positive : Answer::negative);
    exact.push_back({lv.tau, lv.theta, spec[i].second});
  }
  trust = TrustVector(records);
}

}  // namespace

TEST_CASE("bayesian probabilities") {
  SUBCASE("single positive advisor") {
    TrustVector t({{8, 2}});
    const auto p = bayesian_probabilities(AnswerSet({0}, {}), t);
    CHECK(p.p_plus == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(p.p_minus == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("symmetric evidence cancels") {
    TrustVector t(2);
    const auto p = bayesian_probabilities(AnswerSet({0}, {1}), t);
    CHECK(p.p_plus == doctest::Approx(0.5));
  }
  SUBCASE("two against one") {
    // L+ = .9 * .9 * .1, L- = .1 * .1 * .9 -> 0.9 / 0.1
    TrustVector t({{9, 1}, {9, 1}, {9, 1}});
    const auto p = bayesian_probabilities(AnswerSet({0, 1}, {2}), t);
    CHECK(std::abs(p.p_plus - 0.9) < 1e-12);
    CHECK(std::abs(p.p_minus - 0.1) < 1e-12);
  }
  SUBCASE("thirty confident voters do not underflow") {
    std::vector<TrustRecord> recs(30, TrustRecord{1e6, 1});
    TrustVector t(recs);
    std::vector<AdvisorId> pos;
    std::vector<AdvisorId> neg;
    for (AdvisorId i = 0; i < 30; ++i) (i < 16 ? pos : neg).push_back(i);
    const auto p = bayesian_probabilities(AnswerSet(pos, neg), t);
    CHECK(std::isfinite(p.p_plus));
    CHECK(p.p_plus > 0.999);
  }
  CHECK_THROWS_AS(bayesian_probabilities(AnswerSet{}, TrustVector(1)), std::invalid_argument);
}

TEST_CASE("weighted voting probabilities") {
  TrustVector t({{8, 2}, {2, 3}, {3, 2}, {3, 2}, {3, 2}});
  const auto a = weighted_voting_probabilities(AnswerSet({0}, {1}), t);
  CHECK(a.p_plus == doctest::Approx(2.0 / 3.0));
  CHECK(a.p_minus == doctest::Approx(1.0 / 3.0));
  const auto b = weighted_voting_probabilities(AnswerSet({1}, {}), TrustVector(2));
  CHECK(b.p_plus == 1.0);
  CHECK(b.p_minus == 0.0);
  const auto c = weighted_voting_probabilities(AnswerSet({2, 3}, {4, 0}), TrustVector({{3, 2}, {1, 1}, {3, 2}, {3, 2}, {3, 2}}));
  CHECK(c.p_plus == doctest::Approx(0.5));
  CHECK_THROWS_AS(weighted_voting_probabilities(AnswerSet{}, t), std::invalid_argument);
}

TEST_CASE("average uncertainty") {
  CHECK(average_uncertainty(AnswerSet({0}, {1}), TrustVector(2)) == 1.0);
  // theta 0.2 and 0.4
  CHECK(average_uncertainty(AnswerSet({0}, {1}), TrustVector({{9, 1}, {3, 2}})) ==
        doctest::Approx(0.3));
  CHECK(average_uncertainty(AnswerSet({0}, {}), TrustVector({{9, 1}})) == doctest::Approx(0.2));
  CHECK_THROWS_AS(average_uncertainty(AnswerSet{}, TrustVector(1)), std::invalid_argument);
}

TEST_CASE("ensemble decision") {
  SUBCASE("fresh advisors reduce to weighted voting") {
    TrustVector t(3);
    const AnswerSet s({0, 1}, {2});
    const auto e = ensemble_decide(s, t);
    const auto w = weighted_voting_probabilities(s, t);
    CHECK(e.p_positive == w.p_plus);
    CHECK(e.p_negative == w.p_minus);
  }
  SUBCASE("hand trace tau 0.8 theta 0.2") {
    const auto e = ensemble_decide(AnswerSet({0}, {}), TrustVector({{8, 2}}));
    CHECK(e.p_positive == doctest::Approx(0.84).epsilon(1e-12));
    CHECK(e.answer == Answer::positive);
    CHECK(e.confidence == doctest::Approx(0.68).epsilon(1e-12));
  }
  SUBCASE("tie resolves negative") {
    const auto e = ensemble_decide(AnswerSet({0}, {1}), TrustVector(2));
    CHECK(e.p_positive == 0.5);
    CHECK(e.answer == Answer::negative);
    CHECK(e.confidence == 0.0);
  }
  SUBCASE("vanishing uncertainty recovers bayes") {
    TrustVector t({{8e6, 2e6}, {6e6, 4e6}});
    const AnswerSet s({0}, {1});
    const auto e = ensemble_decide(s, t);
    const auto b = bayesian_probabilities(s, t);
    CHECK(std::abs(e.p_positive - b.p_plus) < 1e-6);
  }
}

TEST_CASE("decide and update") {
  SUBCASE("unanimous fresh set") {
    TrustVector t(3);
    const auto e = decide_and_update(AnswerSet({0, 1, 2}, {}), t);
    CHECK(e.confidence == 1.0);
    for (AdvisorId x = 0; x < 3; ++x) CHECK(t[x].alpha == 2.0);
  }
  SUBCASE("split vote leaves trust unchanged") {
    TrustVector t(2);
    const auto before = t;
    decide_and_update(AnswerSet({0}, {1}), t);
    CHECK(t == before);
  }
  SUBCASE("chained from the hand trace") {
    TrustVector t({{8, 2}});
    decide_and_update(AnswerSet({0}, {}), t);
    CHECK(t[0].alpha == doctest::Approx(8.68).epsilon(1e-12));
    CHECK(t[0].beta == 2.0);
  }
}

TEST_CASE("exact-fraction enumeration for small answer sets") {
  // Every ordered answer set with 1..3 members over the five trust levels;
  // the acceptance suite extends this to four members.
  double worst = 0.0;
  std::size_t checked = 0;
  std::vector<std::pair<int, bool>> spec;
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (!spec.empty()) {
      TrustVector trust;
      AnswerSet answers;
      std::vector<oracle::ExactVote> exact;
      build(spec, trust, answers, exact);
      const auto b = bayesian_probabilities(answers, trust);
      const auto w = weighted_voting_probabilities(answers, trust);
      const auto e = ensemble_decide(answers, trust);
      const auto eb = oracle::bayes(exact);
      const auto ew = oracle::weighted(exact);
      const auto ee = oracle::ensemble(exact);
      for (double d : {b.p_plus - to_double(eb.plus), b.p_minus - to_double(eb.minus),
                       w.p_plus - to_double(ew.plus), w.p_minus - to_double(ew.minus),
                       e.p_positive - to_double(ee.plus), e.p_negative - to_double(ee.minus)}) {
        worst = std::max(worst, std::abs(d));
      }
      CHECK((e.answer == Answer::positive) == (ee.plus > ee.minus));
      ++checked;
    }
    if (depth == 3) return;
    for (int lv = 0; lv < 5; ++lv) {
      for (bool pos : {true, false}) {
        spec.emplace_back(lv, pos);
        self(self, depth + 1);
        spec.pop_back();
      }
    }
  };
  recurse(recurse, 0);
  CHECK(checked == 10 + 100 + 1000);
  CHECK(worst < 1e-12);
}

TEST_CASE("normalization, symmetry, monotonicity") {
  RandomSource rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    std::vector<TrustRecord> recs(n + 1);
    for (auto& r : recs) r = {1.0 + 20.0 * rng.uniform(), 1.0 + 20.0 * rng.uniform()};
    const TrustVector trust(recs);
    AnswerSet s;
    for (AdvisorId x = 0; x < n; ++x) s.add(x, rng.bernoulli(0.5) ? Answer::positive : Answer::negative);

    const auto b = bayesian_probabilities(s, trust);
    const auto w = weighted_voting_probabilities(s, trust);
    const auto e = ensemble_decide(s, trust);
    CHECK(std::abs(b.p_plus + b.p_minus - 1.0) < 1e-12);
    CHECK(std::abs(w.p_plus + w.p_minus - 1.0) < 1e-12);
    CHECK(std::abs(e.p_positive + e.p_negative - 1.0) < 1e-12);
    CHECK(e.confidence >= 0.0);
    CHECK(e.confidence <= 1.0);
    CHECK(std::abs(e.confidence - std::abs(e.p_positive - e.p_negative)) <= 1e-12);

    const auto f = s.flipped();
    const auto bf = bayesian_probabilities(f, trust);
    const auto wf = weighted_voting_probabilities(f, trust);
    const auto ef = ensemble_decide(f, trust);
    CHECK(bf.p_plus == doctest::Approx(b.p_minus).epsilon(1e-12));
    CHECK(wf.p_plus == doctest::Approx(w.p_minus).epsilon(1e-12));
    CHECK(ef.p_positive == doctest::Approx(e.p_negative).epsilon(1e-12));

    // One more advisor with trust above one half joining P.
    std::vector<TrustRecord> more = recs;
    more[n] = {2.0 + 10.0 * rng.uniform(), 1.0};
    AnswerSet bigger = s;
    bigger.add(n, Answer::positive);
    CHECK(bayesian_probabilities(bigger, TrustVector(more)).p_plus >= b.p_plus);
  }
}
