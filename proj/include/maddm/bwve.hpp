#pragma once

#include <span>
#include <vector>

#include "maddm/trust.hpp"
#include "maddm/types.hpp"

namespace maddm {

/// Prior probabilities of a positive / negative ground truth.
struct PriorOdds {
  double p_plus = 0.5;
  double p_minus = 0.5;
};

struct ProbabilityPair {
  double p_plus = 0.5;
  double p_minus = 0.5;
};

struct EnsembleOutcome {
  double p_positive = 0.5;
  double p_negative = 0.5;
  Answer answer = Answer::negative;
  double confidence = 0.0;
};

// One advisor's contribution to an aggregate: its answer plus the trust and
// uncertainty the aggregate should weigh it with. The answer-set overloads
// below build these from stored trust; the selection loop builds them with a
// sampled trust for a hypothetical candidate.
struct Vote {
  double trust;
  double uncertainty;
  Answer answer;
};

std::vector<Vote> collect_votes(const AnswerSet& answers, const TrustVector& trust);

// All functions below throw std::invalid_argument on an empty vote/answer set
// and UnknownAdvisorError when the trust vector does not cover a member.

/// Posterior under independent advisors. Accumulated in log space.
ProbabilityPair bayesian_probabilities(std::span<const Vote> votes, PriorOdds prior = {});
ProbabilityPair bayesian_probabilities(const AnswerSet& answers, const TrustVector& trust,
                                       PriorOdds prior = {});

/// Trust-weighted share of each side.
ProbabilityPair weighted_voting_probabilities(std::span<const Vote> votes);
ProbabilityPair weighted_voting_probabilities(const AnswerSet& answers, const TrustVector& trust);

double average_uncertainty(std::span<const Vote> votes);
double average_uncertainty(const AnswerSet& answers, const TrustVector& trust);

/// Mixes the Bayesian posterior and the weighted vote by the average
/// uncertainty of the voters. Ties resolve to the negative answer.
EnsembleOutcome ensemble_decide(std::span<const Vote> votes, PriorOdds prior = {});
EnsembleOutcome ensemble_decide(const AnswerSet& answers, const TrustVector& trust,
                                PriorOdds prior = {});

/// ensemble_decide followed by apply_confidence_update on `trust`.
EnsembleOutcome decide_and_update(const AnswerSet& answers, TrustVector& trust,
                                  PriorOdds prior = {});

}  // namespace maddm
