#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "maddm/em.hpp"
#include "maddm/environment.hpp"
#include "maddm/random.hpp"
#include "maddm/run_result.hpp"
#include "maddm/selection.hpp"
#include "maddm/trust.hpp"

namespace maddm {

enum class StrategyKind { epsilon_greedy, ucb, thompson };
enum class Criterion { trustworthiness, cost_effectiveness };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::epsilon_greedy;
  double epsilon = 0.1;
  Criterion criterion = Criterion::cost_effectiveness;

  void validate() const;
};

enum class BaselineMethod { fna, bc, rv, bu };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::fna;
  std::size_t fna_k = 5;
  double bc_budget_fraction = 0.10;  // of profit + loss
  std::size_t rv_k = 3;
  std::size_t exploration_first_rounds = 10;  // 0 disables

  void validate() const;
};

// What a bandit-driven baseline knows about the pool: Beta evidence from
// confidence updates (drives Thompson draws and UCB counts) and the latest EM
// accuracy estimates (drive greedy and UCB scores).
struct BanditState {
  TrustVector trust;
  std::vector<double> accuracy;
  std::size_t decisions_elapsed = 0;

  explicit BanditState(std::size_t n_advisors, double init_accuracy = 0.6)
      : trust(n_advisors), accuracy(n_advisors, init_accuracy) {}
};

/// Price per unit of accuracy above chance, c / (tau - 0.5). Lower is better;
/// +infinity when tau <= 0.5.
double cost_effectiveness(const AdvisorOffer& offer, double trust_estimate);

/// Exactly k distinct advisors. Throws std::invalid_argument if k > |pool|.
std::vector<AdvisorId> select_fixed_number(std::span<const AdvisorOffer> pool,
                                           const BanditState& state,
                                           const StrategyConfig& strategy, std::size_t k,
                                           RandomSource& rng);

/// Picks advisors in strategy order until the next one would push the total
/// price over `budget`.
std::vector<AdvisorId> select_budget_constrained(std::span<const AdvisorOffer> pool,
                                                 const BanditState& state,
                                                 const StrategyConfig& strategy, double budget,
                                                 RandomSource& rng);

/// Majority of the answers; ties resolve to negative.
Answer majority_vote(const AnswerSet& answers);

RunResult run_baseline(const BaselineConfig& method, const StrategyConfig& strategy,
                       const Environment& env, RandomSource& rng, bool record_trace = false);

std::string to_string(StrategyKind k);
std::string to_string(Criterion c);
std::string to_string(BaselineMethod m);

void to_json(nlohmann::json& j, const StrategyConfig& s);
void from_json(const nlohmann::json& j, StrategyConfig& s);

}  // namespace maddm
