#include "maddm/trust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maddm {

namespace {
constexpr double kTrustFloor = 1e-9;
}

double thompson_sample(const TrustRecord& r, RandomSource& rng) {
  return rng.beta(r.alpha, r.beta);
}

double clamp_trust(double tau) noexcept {
  return std::clamp(tau, kTrustFloor, 1.0 - kTrustFloor);
}

const TrustRecord& TrustVector::at(AdvisorId id) const {
  if (id >= records_.size()) throw UnknownAdvisorError(id);
  return records_[id];
}

TrustRecord& TrustVector::at(AdvisorId id) {
  if (id >= records_.size()) throw UnknownAdvisorError(id);
  return records_[id];
}

void TrustVector::check_covers(const AnswerSet& answers) const {
  for (auto id : answers.positives()) {
    if (id >= records_.size()) throw UnknownAdvisorError(id);
  }
  for (auto id : answers.negatives()) {
    if (id >= records_.size()) throw UnknownAdvisorError(id);
  }
}

double trust_l1_distance(const TrustVector& a, const TrustVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("trust vectors differ in size");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += std::abs(trustworthiness(a[i]) - trustworthiness(b[i]));
  }
  return total;
}

void apply_confidence_update(TrustVector& trust, const AnswerSet& answers, Answer answer,
                             double confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("confidence must lie in [0, 1]");
  }
  trust.check_covers(answers);
  // Advisors who agreed with the chosen answer gain alpha, the rest gain beta.
  for (auto id : answers.members(answer)) trust[id].alpha += confidence;
  for (auto id : answers.members(opposite(answer))) trust[id].beta += confidence;
}

void to_json(nlohmann::json& j, const TrustRecord& r) {
  j = nlohmann::json{{"alpha", r.alpha}, {"beta", r.beta}};
}

void from_json(const nlohmann::json& j, TrustRecord& r) {
  r.alpha = j.at("alpha").get<double>();
  r.beta = j.at("beta").get<double>();
  if (!(r.alpha >= 1.0 && r.beta >= 1.0)) {
    throw std::invalid_argument("trust record evidence must be >= 1");
  }
}

void to_json(nlohmann::json& j, const TrustVector& v) {
  j = nlohmann::json::array();
  for (const auto& r : v) j.push_back(r);
}

void from_json(const nlohmann::json& j, TrustVector& v) {
  v = TrustVector(j.get<std::vector<TrustRecord>>());
}

}  // namespace maddm
