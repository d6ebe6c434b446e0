#pragma once

#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "maddm/bwve.hpp"
#include "maddm/random.hpp"
#include "maddm/trust.hpp"
#include "maddm/types.hpp"

namespace maddm {

/// Gained when the decision is answered correctly / paid when it is wrong.
struct DecisionValue {
  double profit = 0.0;
  double loss = 0.0;

  double stake() const noexcept { return profit + loss; }
};

struct AdvisorOffer {
  AdvisorId id = 0;
  double cost = 0.0;
};

struct SelectionOutcome {
  AnswerSet answers;
  std::vector<AdvisorId> hired;  // hire order
  double total_cost = 0.0;
  std::size_t rounds = 0;  // utility-evaluation rounds executed
};

/// Supplies an advisor's answer once it has been hired.
using AnswerOracle = std::function<Answer(AdvisorId)>;

/// Expected contribution V of adding `candidate` to `current`, evaluated with
/// the sampled trust for the candidate and stored trust for everyone already
/// consulted. The caller subtracts the price to get the marginal utility.
/// Throws std::invalid_argument if the candidate already answered.
double marginal_contribution(const AdvisorOffer& candidate, double sampled_trust,
                             const AnswerSet& current, const TrustVector& trust,
                             const DecisionValue& value, PriorOdds prior = {});

/// Hires advisors one at a time while the best Thompson-sampled marginal
/// utility is positive. May return an empty answer set.
SelectionOutcome select_advisors(const DecisionValue& value, std::span<const AdvisorOffer> pool,
                                 const TrustVector& trust, PriorOdds prior,
                                 const AnswerOracle& oracle, RandomSource& rng);

/// Bernoulli answer: `truth` with probability `hidden_accuracy`.
Answer query_answer(double hidden_accuracy, Answer truth, RandomSource& rng);

// Answers drawn on first query and replayed afterwards.
class MemoizedOracle {
 public:
  explicit MemoizedOracle(std::uint64_t seed) : rng_(seed) {}

  Answer query(AdvisorId advisor, DecisionId decision, double hidden_accuracy, Answer truth);

  std::size_t cached() const noexcept { return answers_.size(); }

 private:
  RandomSource rng_;
  std::map<std::pair<AdvisorId, DecisionId>, Answer> answers_;
};

}  // namespace maddm
