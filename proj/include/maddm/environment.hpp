#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "maddm/random.hpp"
#include "maddm/selection.hpp"
#include "maddm/types.hpp"

namespace maddm {

/// Rectified Gaussian: a normal draw clamped into [lower, upper]. Mass that
/// falls outside piles up on the bound.
struct ErgdParams {
  double mean = 0.0;
  double std = 1.0;
  double lower = 0.0;
  std::optional<double> upper;

  void validate() const;
};

double ergd_sample(const ErgdParams& params, RandomSource& rng);

struct EnvironmentConfig {
  std::size_t n_decisions = 1000;
  std::size_t n_advisors = 30;
  ErgdParams profit{100.0, 100.0, 0.0, std::nullopt};
  ErgdParams loss{100.0, 100.0, 0.0, std::nullopt};
  ErgdParams accuracy{0.8, 0.3, 0.0, 1.0};
  double cost_mean_factor = 20.0;  // cost mean = hidden accuracy * factor
  double cost_std = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Decision values with mean = std = `value_scale` for both profit and loss.
EnvironmentConfig make_environment_config(double value_scale, double accuracy_mean,
                                          std::uint64_t seed);

struct SimulatedAdvisor {
  AdvisorId id = 0;
  double hidden_accuracy = 0.0;
  double cost = 0.0;
};

struct SimulatedDecision {
  DecisionId id = 0;
  DecisionValue value;
  Answer truth = Answer::positive;
};

// One realized world: decisions, advisors, and every advisor's answer to every
// decision, fixed at generation time so that all methods run against the same
// realization.
class Environment {
 public:
  Environment() = default;
  Environment(std::vector<SimulatedDecision> decisions, std::vector<SimulatedAdvisor> advisors,
              std::vector<Answer> answers);

  const std::vector<SimulatedDecision>& decisions() const noexcept { return decisions_; }
  const std::vector<SimulatedAdvisor>& advisors() const noexcept { return advisors_; }
  std::size_t n_decisions() const noexcept { return decisions_.size(); }
  std::size_t n_advisors() const noexcept { return advisors_.size(); }

  /// Realized answer of `advisor` to `decision`.
  Answer answer(AdvisorId advisor, DecisionId decision) const;

  /// Prices only; hidden accuracies stay inside the environment.
  std::vector<AdvisorOffer> offers() const;

  /// Sum of every advisor's price.
  double pool_cost() const noexcept;

  /// FNV-1a over the full realization, including answers.
  std::uint64_t digest() const noexcept;

 private:
  std::vector<SimulatedDecision> decisions_;
  std::vector<SimulatedAdvisor> advisors_;
  std::vector<Answer> answers_;  // row-major [decision][advisor]
};

Environment generate_environment(const EnvironmentConfig& config);

/// Advisor and decision tables plus the config that produced them.
nlohmann::json environment_to_json(const Environment& env, const EnvironmentConfig& config);

void to_json(nlohmann::json& j, const ErgdParams& p);
void from_json(const nlohmann::json& j, ErgdParams& p);
void to_json(nlohmann::json& j, const EnvironmentConfig& c);
void from_json(const nlohmann::json& j, EnvironmentConfig& c);

}  // namespace maddm
