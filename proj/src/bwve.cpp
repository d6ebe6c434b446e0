#include "maddm/bwve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maddm {

namespace {

// Differences this small are rounding noise (1 - 0.9 != 0.1 in binary), so
// they count as ties.
constexpr double kTieTolerance = 1e-12;

void require_votes(std::span<const Vote> votes) {
  if (votes.empty()) throw std::invalid_argument("empty answer set");
}

}  // namespace

std::vector<Vote> collect_votes(const AnswerSet& answers, const TrustVector& trust) {
  trust.check_covers(answers);
  std::vector<Vote> votes;
  votes.reserve(answers.size());
  for (auto id : answers.positives()) {
    votes.push_back({trust.tau(id), trust.theta(id), Answer::positive});
  }
  for (auto id : answers.negatives()) {
    votes.push_back({trust.tau(id), trust.theta(id), Answer::negative});
  }
  return votes;
}

ProbabilityPair bayesian_probabilities(std::span<const Vote> votes, PriorOdds prior) {
  require_votes(votes);
  double log_pos = std::log(prior.p_plus);
  double log_neg = std::log(prior.p_minus);
  for (const auto& v : votes) {
    const double t = clamp_trust(v.trust);
    const double agree = std::log(t);
    const double disagree = std::log1p(-t);
    if (v.answer == Answer::positive) {
      log_pos += agree;
      log_neg += disagree;
    } else {
      log_pos += disagree;
      log_neg += agree;
    }
  }
  const double m = std::max(log_pos, log_neg);
  const double a = std::exp(log_pos - m);
  const double b = std::exp(log_neg - m);
  return {a / (a + b), b / (a + b)};
}

ProbabilityPair bayesian_probabilities(const AnswerSet& answers, const TrustVector& trust,
                                       PriorOdds prior) {
  const auto votes = collect_votes(answers, trust);
  return bayesian_probabilities(votes, prior);
}

ProbabilityPair weighted_voting_probabilities(std::span<const Vote> votes) {
  require_votes(votes);
  double pos = 0.0;
  double neg = 0.0;
  for (const auto& v : votes) {
    (v.answer == Answer::positive ? pos : neg) += v.trust;
  }
  const double total = pos + neg;
  if (!(total > 0.0)) throw std::invalid_argument("weighted vote with zero total trust");
  return {pos / total, neg / total};
}

ProbabilityPair weighted_voting_probabilities(const AnswerSet& answers, const TrustVector& trust) {
  const auto votes = collect_votes(answers, trust);
  return weighted_voting_probabilities(votes);
}

double average_uncertainty(std::span<const Vote> votes) {
  require_votes(votes);
  double sum = 0.0;
  for (const auto& v : votes) sum += v.uncertainty;
  return sum / static_cast<double>(votes.size());
}

double average_uncertainty(const AnswerSet& answers, const TrustVector& trust) {
  const auto votes = collect_votes(answers, trust);
  return average_uncertainty(votes);
}

EnsembleOutcome ensemble_decide(std::span<const Vote> votes, PriorOdds prior) {
  const auto bayes = bayesian_probabilities(votes, prior);
  const auto weighted = weighted_voting_probabilities(votes);
  const double theta = average_uncertainty(votes);

  EnsembleOutcome out;
  out.p_positive = (1.0 - theta) * bayes.p_plus + theta * weighted.p_plus;
  out.p_negative = (1.0 - theta) * bayes.p_minus + theta * weighted.p_minus;
  const double gap = out.p_positive - out.p_negative;
  if (std::abs(gap) <= kTieTolerance) {
    out.answer = Answer::negative;
    out.confidence = 0.0;
  } else {
    out.answer = gap > 0.0 ? Answer::positive : Answer::negative;
    out.confidence = std::min(1.0, std::abs(gap));
  }
  return out;
}

EnsembleOutcome ensemble_decide(const AnswerSet& answers, const TrustVector& trust,
                                PriorOdds prior) {
  const auto votes = collect_votes(answers, trust);
  return ensemble_decide(votes, prior);
}

EnsembleOutcome decide_and_update(const AnswerSet& answers, TrustVector& trust, PriorOdds prior) {
  const auto outcome = ensemble_decide(answers, trust, prior);
  apply_confidence_update(trust, answers, outcome.answer, outcome.confidence);
  return outcome;
}

}  // namespace maddm
