#include "maddm/environment.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace maddm {

namespace {

enum Stream : std::uint64_t { kValues = 1, kAdvisors = 2, kAnswers = 3 };

class Fnv1a {
 public:
  void add(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffU;
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) noexcept { add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

void ErgdParams::validate() const {
  if (!(std >= 0.0)) throw std::invalid_argument("ERGd std must be non-negative");
  if (upper && !(lower <= *upper)) throw std::invalid_argument("ERGd lower bound exceeds upper");
}

double ergd_sample(const ErgdParams& params, RandomSource& rng) {
  const double x = params.std > 0.0 ? rng.normal(params.mean, params.std) : params.mean;
  const double hi = params.upper.value_or(x);
  return std::clamp(x, params.lower, std::max(params.lower, hi));
}

void EnvironmentConfig::validate() const {
  if (n_decisions == 0 || n_advisors == 0) {
    throw std::invalid_argument("environment needs at least one decision and one advisor");
  }
  profit.validate();
  loss.validate();
  accuracy.validate();
  if (!(cost_std >= 0.0)) throw std::invalid_argument("cost std must be non-negative");
}

EnvironmentConfig make_environment_config(double value_scale, double accuracy_mean,
                                          std::uint64_t seed) {
  EnvironmentConfig c;
  c.profit = {value_scale, value_scale, 0.0, std::nullopt};
  c.loss = c.profit;
  c.accuracy.mean = accuracy_mean;
  c.seed = seed;
  return c;
}

Environment::Environment(std::vector<SimulatedDecision> decisions,
                         std::vector<SimulatedAdvisor> advisors, std::vector<Answer> answers)
    : decisions_(std::move(decisions)),
      advisors_(std::move(advisors)),
      answers_(std::move(answers)) {
  if (answers_.size() != decisions_.size() * advisors_.size()) {
    throw std::invalid_argument("answer matrix does not match decisions x advisors");
  }
}

Answer Environment::answer(AdvisorId advisor, DecisionId decision) const {
  if (advisor >= advisors_.size()) throw UnknownAdvisorError(advisor);
  if (decision >= decisions_.size()) throw std::out_of_range("unknown decision id");
  return answers_[decision * advisors_.size() + advisor];
}

std::vector<AdvisorOffer> Environment::offers() const {
  std::vector<AdvisorOffer> out;
  out.reserve(advisors_.size());
  for (const auto& a : advisors_) out.push_back({a.id, a.cost});
  return out;
}

double Environment::pool_cost() const noexcept {
  double total = 0.0;
  for (const auto& a : advisors_) total += a.cost;
  return total;
}

std::uint64_t Environment::digest() const noexcept {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(decisions_.size()));
  h.add(static_cast<std::uint64_t>(advisors_.size()));
  for (const auto& d : decisions_) {
    h.add(d.value.profit);
    h.add(d.value.loss);
    h.add(static_cast<std::uint64_t>(to_int(d.truth) + 1));
  }
  for (const auto& a : advisors_) {
    h.add(a.hidden_accuracy);
    h.add(a.cost);
  }
  for (auto a : answers_) h.add(static_cast<std::uint64_t>(to_int(a) + 1));
  return h.value();
}

Environment generate_environment(const EnvironmentConfig& config) {
  config.validate();
  RandomSource value_rng(derive_seed(config.seed, {kValues}));
  RandomSource advisor_rng(derive_seed(config.seed, {kAdvisors}));
  RandomSource answer_rng(derive_seed(config.seed, {kAnswers}));

  std::vector<SimulatedDecision> decisions(config.n_decisions);
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    decisions[d].id = d;
    decisions[d].value.profit = ergd_sample(config.profit, value_rng);
    decisions[d].value.loss = ergd_sample(config.loss, value_rng);
    decisions[d].truth = Answer::positive;
  }

  std::vector<SimulatedAdvisor> advisors(config.n_advisors);
  for (std::size_t x = 0; x < advisors.size(); ++x) {
    advisors[x].id = x;
    advisors[x].hidden_accuracy = ergd_sample(config.accuracy, advisor_rng);
    const ErgdParams cost{advisors[x].hidden_accuracy * config.cost_mean_factor, config.cost_std,
                          0.0, std::nullopt};
    advisors[x].cost = ergd_sample(cost, advisor_rng);
  }

  std::vector<Answer> answers;
  answers.reserve(config.n_decisions * config.n_advisors);
  for (const auto& d : decisions) {
    for (const auto& a : advisors) {
      answers.push_back(query_answer(a.hidden_accuracy, d.truth, answer_rng));
    }
  }
  return Environment(std::move(decisions), std::move(advisors), std::move(answers));
}

nlohmann::json environment_to_json(const Environment& env, const EnvironmentConfig& config) {
  nlohmann::json advisors = nlohmann::json::array();
  for (const auto& a : env.advisors()) {
    advisors.push_back({{"id", a.id}, {"hidden_accuracy", a.hidden_accuracy}, {"cost", a.cost}});
  }
  nlohmann::json decisions = nlohmann::json::array();
  for (const auto& d : env.decisions()) {
    decisions.push_back({{"id", d.id}, {"profit", d.value.profit}, {"loss", d.value.loss}});
  }
  return {{"config", config},
          {"digest", env.digest()},
          {"advisors", std::move(advisors)},
          {"decisions", std::move(decisions)}};
}

void to_json(nlohmann::json& j, const ErgdParams& p) {
  j = nlohmann::json{{"mean", p.mean}, {"std", p.std}, {"lower", p.lower}};
  j["upper"] = p.upper ? nlohmann::json(*p.upper) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, ErgdParams& p) {
  p.mean = j.at("mean").get<double>();
  p.std = j.at("std").get<double>();
  p.lower = j.value("lower", 0.0);
  if (j.contains("upper") && !j.at("upper").is_null()) {
    p.upper = j.at("upper").get<double>();
  } else {
    p.upper.reset();
  }
  p.validate();
}

void to_json(nlohmann::json& j, const EnvironmentConfig& c) {
  j = nlohmann::json{{"n_decisions", c.n_decisions},
                     {"n_advisors", c.n_advisors},
                     {"profit", c.profit},
                     {"loss", c.loss},
                     {"accuracy", c.accuracy},
                     {"cost_mean_factor", c.cost_mean_factor},
                     {"cost_std", c.cost_std},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, EnvironmentConfig& c) {
  c = EnvironmentConfig{};
  c.n_decisions = j.value("n_decisions", c.n_decisions);
  c.n_advisors = j.value("n_advisors", c.n_advisors);
  if (j.contains("profit")) c.profit = j.at("profit").get<ErgdParams>();
  if (j.contains("loss")) c.loss = j.at("loss").get<ErgdParams>();
  if (j.contains("accuracy")) c.accuracy = j.at("accuracy").get<ErgdParams>();
  c.cost_mean_factor = j.value("cost_mean_factor", c.cost_mean_factor);
  c.cost_std = j.value("cost_std", c.cost_std);
  c.seed = j.value("seed", c.seed);
  c.validate();
}

}  // namespace maddm
