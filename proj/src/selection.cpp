#include "maddm/selection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace maddm {

namespace {

// V = (2 tau' - 1) * (dV+ + dV-), where dV+- is the prior-weighted shift of
// the ensemble probability if the candidate joined the positive (negative)
// side, scaled by the decision's stake.
double contribution(std::vector<Vote>& votes, const ProbabilityPair& current, double sampled_trust,
                    double candidate_uncertainty, const DecisionValue& value, PriorOdds prior) {
  votes.push_back({sampled_trust, candidate_uncertainty, Answer::positive});
  const double p_pos = ensemble_decide(votes, prior).p_positive;
  votes.back().answer = Answer::negative;
  const double p_neg = ensemble_decide(votes, prior).p_negative;
  votes.pop_back();

  const double gain_pos = prior.p_plus * std::abs(p_pos - current.p_plus) * value.stake();
  const double gain_neg = prior.p_minus * std::abs(p_neg - current.p_minus) * value.stake();
  return (2.0 * sampled_trust - 1.0) * (gain_pos + gain_neg);
}

ProbabilityPair current_probabilities(std::span<const Vote> votes, PriorOdds prior) {
  if (votes.empty()) return {0.5, 0.5};
  const auto out = ensemble_decide(votes, prior);
  return {out.p_positive, out.p_negative};
}

}  // namespace

double marginal_contribution(const AdvisorOffer& candidate, double sampled_trust,
                             const AnswerSet& current, const TrustVector& trust,
                             const DecisionValue& value, PriorOdds prior) {
  if (current.contains(candidate.id)) {
    throw std::invalid_argument("candidate already consulted for this decision");
  }
  auto votes = collect_votes(current, trust);
  const auto probs = current_probabilities(votes, prior);
  return contribution(votes, probs, sampled_trust, trust.theta(candidate.id), value, prior);
}

SelectionOutcome select_advisors(const DecisionValue& value, std::span<const AdvisorOffer> pool,
                                 const TrustVector& trust, PriorOdds prior,
                                 const AnswerOracle& oracle, RandomSource& rng) {
  SelectionOutcome out;
  std::vector<AdvisorOffer> remaining(pool.begin(), pool.end());
  for (const auto& offer : remaining) trust.at(offer.id);

  std::vector<Vote> votes;
  ProbabilityPair probs{0.5, 0.5};

  while (!remaining.empty()) {
    ++out.rounds;
    std::size_t best = 0;
    double best_utility = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const auto& record = trust[remaining[i].id];
      const double sampled = thompson_sample(record, rng);
      const double u =
          contribution(votes, probs, sampled, uncertainty(record), value, prior) - remaining[i].cost;
      if (u > best_utility) {
        best_utility = u;
        best = i;
      }
    }
    if (!(best_utility > 0.0)) break;

    const auto hire = remaining[best];
    const Answer answer = oracle(hire.id);
    out.answers.add(hire.id, answer);
    out.hired.push_back(hire.id);
    out.total_cost += hire.cost;
    votes.push_back({trust.tau(hire.id), trust.theta(hire.id), answer});
    probs = current_probabilities(votes, prior);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

Answer query_answer(double hidden_accuracy, Answer truth, RandomSource& rng) {
  return rng.uniform() < hidden_accuracy ? truth : opposite(truth);
}

Answer MemoizedOracle::query(AdvisorId advisor, DecisionId decision, double hidden_accuracy,
                             Answer truth) {
  const auto key = std::make_pair(advisor, decision);
  if (auto it = answers_.find(key); it != answers_.end()) return it->second;
  const Answer a = query_answer(hidden_accuracy, truth, rng_);
  answers_.emplace(key, a);
  return a;
}

}  // namespace maddm
