#include "maddm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace maddm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Strategy-specific estimate of each advisor's accuracy.
std::vector<double> strategy_estimates(std::span<const AdvisorOffer> pool, const BanditState& state,
                                       const StrategyConfig& strategy, RandomSource& rng) {
  std::vector<double> q(pool.size());
  const double t = static_cast<double>(state.decisions_elapsed + 1);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto id = pool[i].id;
    switch (strategy.kind) {
      case StrategyKind::epsilon_greedy:
        q[i] = state.accuracy.at(id);
        break;
      case StrategyKind::ucb: {
        const auto& r = state.trust.at(id);
        const double n = r.alpha + r.beta - 2.0;
        q[i] = n > 0.0 ? state.accuracy.at(id) + std::sqrt(2.0 * std::log(t) / n) : kInf;
        break;
      }
      case StrategyKind::thompson:
        q[i] = thompson_sample(state.trust.at(id), rng);
        break;
    }
  }
  return q;
}

// Lower key is better.
double rank_key(const AdvisorOffer& offer, double estimate, Criterion criterion) {
  return criterion == Criterion::trustworthiness ? -estimate
                                                 : cost_effectiveness(offer, estimate);
}

// Up to `slots` pool indices in pick order.
std::vector<std::size_t> pick_order(std::span<const AdvisorOffer> pool, const BanditState& state,
                                    const StrategyConfig& strategy, std::size_t slots,
                                    RandomSource& rng) {
  const auto estimates = strategy_estimates(pool, state, strategy, rng);
  std::vector<double> keys(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    keys[i] = rank_key(pool[i], estimates[i], strategy.criterion);
  }
  std::vector<std::size_t> ranked(pool.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return pool[a].id < pool[b].id;
  });
  slots = std::min(slots, pool.size());
  if (strategy.kind != StrategyKind::epsilon_greedy || strategy.epsilon <= 0.0) {
    ranked.resize(slots);
    return ranked;
  }

  // Each slot: explore uniformly with probability epsilon, else best remaining.
  std::vector<std::size_t> order;
  order.reserve(slots);
  while (order.size() < slots) {
    std::size_t pos = 0;
    if (rng.uniform() < strategy.epsilon) pos = rng.index(ranked.size());
    order.push_back(ranked[pos]);
    ranked.erase(ranked.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return order;
}

std::vector<AdvisorId> random_subset(std::size_t n, std::size_t k, RandomSource& rng) {
  std::vector<AdvisorId> ids(n);
  std::iota(ids.begin(), ids.end(), AdvisorId{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(ids[i], ids[i + rng.index(n - i)]);
  }
  ids.resize(k);
  return ids;
}

}  // namespace

void StrategyConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0,1]");
}

void BaselineConfig::validate() const {
  if (fna_k < 1) throw std::invalid_argument("fna_k must be >= 1");
  if (!(bc_budget_fraction > 0.0 && bc_budget_fraction <= 1.0)) {
    throw std::invalid_argument("bc_budget_fraction must be in (0,1]");
  }
  if (rv_k < 1) throw std::invalid_argument("rv_k must be >= 1");
}

double cost_effectiveness(const AdvisorOffer& offer, double trust_estimate) {
  if (!(trust_estimate > 0.5)) return kInf;
  return offer.cost / (trust_estimate - 0.5);
}

std::vector<AdvisorId> select_fixed_number(std::span<const AdvisorOffer> pool,
                                           const BanditState& state,
                                           const StrategyConfig& strategy, std::size_t k,
                                           RandomSource& rng) {
  if (k > pool.size()) throw std::invalid_argument("k exceeds pool size");
  std::vector<AdvisorId> out;
  for (auto i : pick_order(pool, state, strategy, k, rng)) out.push_back(pool[i].id);
  return out;
}

std::vector<AdvisorId> select_budget_constrained(std::span<const AdvisorOffer> pool,
                                                 const BanditState& state,
                                                 const StrategyConfig& strategy, double budget,
                                                 RandomSource& rng) {
  std::vector<AdvisorId> out;
  double spent = 0.0;
  for (auto i : pick_order(pool, state, strategy, pool.size(), rng)) {
    if (spent + pool[i].cost > budget) break;
    spent += pool[i].cost;
    out.push_back(pool[i].id);
  }
  return out;
}

Answer majority_vote(const AnswerSet& answers) {
  return answers.positives().size() > answers.negatives().size() ? Answer::positive
                                                                 : Answer::negative;
}

RunResult run_baseline(const BaselineConfig& method, const StrategyConfig& strategy,
                       const Environment& env, RandomSource& rng, bool record_trace) {
  method.validate();
  strategy.validate();
  RunResult result;
  result.method = to_string(method.method);
  const auto offers = env.offers();
  const std::size_t n = env.n_advisors();

  BanditState state(n);
  constexpr EmConfig kBaselineEm{1e-6, 100, false};
  EmState em = em_initial_state(n);
  std::vector<AnswerSet> history;
  bool any_answers = false;

  for (const auto& decision : env.decisions()) {
    const DecisionId d = decision.id;
    state.decisions_elapsed = d;

    TraceRow row;
    row.decision_id = d;

    if (method.method == BaselineMethod::bu) {
      // Upper bound: every decision correct, nobody paid.
      row.answer = decision.truth;
      row.p_positive = decision.truth == Answer::positive ? 1.0 : 0.0;
      row.confidence = 1.0;
      row.correct = true;
      row.utility = result.book(decision.value, decision.truth, decision.truth, 0.0);
      if (record_trace) result.trace.push_back(std::move(row));
      continue;
    }

    std::vector<AdvisorId> hired;
    if (d < method.exploration_first_rounds) {
      hired.resize(n);
      std::iota(hired.begin(), hired.end(), AdvisorId{0});
    } else {
      switch (method.method) {
        case BaselineMethod::fna:
          hired = select_fixed_number(offers, state, strategy, std::min(method.fna_k, n), rng);
          break;
        case BaselineMethod::bc:
          hired = select_budget_constrained(
              offers, state, strategy, method.bc_budget_fraction * decision.value.stake(), rng);
          break;
        case BaselineMethod::rv:
          hired = random_subset(n, method.rv_k, rng);
          break;
        case BaselineMethod::bu:
          break;
      }
    }

    AnswerSet answers;
    double cost = 0.0;
    for (auto id : hired) {
      answers.add(id, env.answer(id, d));
      cost += offers[id].cost;
    }

    Answer answer = Answer::negative;
    double p_positive = 0.5;
    if (method.method == BaselineMethod::rv) {
      answer = majority_vote(answers);
      if (!answers.empty()) {
        p_positive = static_cast<double>(answers.positives().size()) /
                     static_cast<double>(answers.size());
      }
    } else {
      history.push_back(answers);
      any_answers = any_answers || !answers.empty();
      if (any_answers) {
        em = em_aggregate(history, em, kBaselineEm);
        state.accuracy = em.accuracies;
        p_positive = em.posteriors.back();
      }
      answer = p_positive > 0.5 ? Answer::positive : Answer::negative;
      if (!answers.empty()) {
        apply_confidence_update(state.trust, answers, answer,
                                std::min(1.0, std::abs(2.0 * p_positive - 1.0)));
      }
    }

    row.p_positive = p_positive;
    row.answer = answer;
    row.confidence = std::abs(2.0 * p_positive - 1.0);
    row.hired = hired;
    row.total_cost = cost;
    row.correct = answer == decision.truth;
    row.utility = result.book(decision.value, answer, decision.truth, cost);
    result.hired_count += hired.size();
    if (record_trace) result.trace.push_back(std::move(row));
  }
  return result;
}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::epsilon_greedy: return "epsilon_greedy";
    case StrategyKind::ucb: return "ucb";
    case StrategyKind::thompson: return "thompson";
  }
  return "?";
}

std::string to_string(Criterion c) {
  return c == Criterion::trustworthiness ? "trustworthiness" : "cost_effectiveness";
}

std::string to_string(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::fna: return "FNA";
    case BaselineMethod::bc: return "BC";
    case BaselineMethod::rv: return "RV";
    case BaselineMethod::bu: return "BU";
  }
  return "?";
}

void to_json(nlohmann::json& j, const StrategyConfig& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)},
                     {"epsilon", s.epsilon},
                     {"criterion", to_string(s.criterion)}};
}

void from_json(const nlohmann::json& j, StrategyConfig& s) {
  s = StrategyConfig{};
  const auto kind = j.value("kind", to_string(s.kind));
  if (kind == "epsilon_greedy") {
    s.kind = StrategyKind::epsilon_greedy;
  } else if (kind == "ucb") {
    s.kind = StrategyKind::ucb;
  } else if (kind == "thompson") {
    s.kind = StrategyKind::thompson;
  } else {
    throw std::invalid_argument("unknown strategy kind '" + kind + "'");
  }
  s.epsilon = j.value("epsilon", s.epsilon);
  const auto criterion = j.value("criterion", to_string(s.criterion));
  if (criterion == "trustworthiness") {
    s.criterion = Criterion::trustworthiness;
  } else if (criterion == "cost_effectiveness") {
    s.criterion = Criterion::cost_effectiveness;
  } else {
    throw std::invalid_argument("unknown selection criterion '" + criterion + "'");
  }
  s.validate();
}

}  // namespace maddm
