#include "maddm/review.hpp"

#include <cmath>
#include <stdexcept>

namespace maddm {

void ReviewConfig::validate() const {
  if (!(threshold > 0.0)) throw std::invalid_argument("review threshold must be positive");
  if (max_passes < 1) throw std::invalid_argument("review max_passes must be >= 1");
  if (frequency < 1) throw std::invalid_argument("review frequency must be >= 1");
}

void DecisionHistory::append(DecisionId id, AnswerSet answers) {
  for (const auto& e : entries_) {
    if (e.id == id) throw std::invalid_argument("duplicate decision id in history");
  }
  entries_.push_back({id, std::move(answers)});
}

ReviewResult review_update(const DecisionHistory& history, const TrustVector& trust,
                           const ReviewConfig& config, PriorOdds prior) {
  config.validate();
  ReviewResult result{trust, 0, 0.0};
  if (history.empty()) return result;
  for (const auto& e : history.entries()) trust.check_covers(e.answers);

  TrustVector& current = result.trust;
  while (result.passes_used < config.max_passes) {
    TrustVector next = config.mode == ReviewMode::rebuild ? TrustVector(current.size()) : current;
    for (const auto& e : history.entries()) {
      if (e.answers.empty()) continue;
      // Rebuild evaluates against the previous pass; cumulative against the
      // running vector.
      const TrustVector& basis = config.mode == ReviewMode::rebuild ? current : next;
      const auto outcome = ensemble_decide(e.answers, basis, prior);
      apply_confidence_update(next, e.answers, outcome.answer, outcome.confidence);
    }
    result.final_delta_tau = trust_l1_distance(next, current);
    current = std::move(next);
    ++result.passes_used;
    if (result.final_delta_tau <= config.threshold) break;
  }
  return result;
}

void to_json(nlohmann::json& j, const ReviewConfig& c) {
  j = nlohmann::json{{"threshold", c.threshold},
                     {"max_passes", c.max_passes},
                     {"frequency", c.frequency},
                     {"mode", c.mode == ReviewMode::rebuild ? "rebuild" : "cumulative"}};
}

void from_json(const nlohmann::json& j, ReviewConfig& c) {
  c = ReviewConfig{};
  c.threshold = j.value("threshold", c.threshold);
  c.max_passes = j.value("max_passes", c.max_passes);
  c.frequency = j.value("frequency", c.frequency);
  const auto mode = j.value("mode", std::string("rebuild"));
  if (mode == "rebuild") {
    c.mode = ReviewMode::rebuild;
  } else if (mode == "cumulative") {
    c.mode = ReviewMode::cumulative;
  } else {
    throw std::invalid_argument("unknown review mode '" + mode + "'");
  }
  c.validate();
}

}  // namespace maddm
