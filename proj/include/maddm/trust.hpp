#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "maddm/random.hpp"
#include "maddm/types.hpp"

namespace maddm {

/// Beta evidence for one advisor. Both counts start at 1 (uniform prior) and
/// only ever grow.
struct TrustRecord {
  double alpha = 1.0;  // advice estimated correct
  double beta = 1.0;   // advice estimated incorrect

  friend bool operator==(const TrustRecord&, const TrustRecord&) = default;
};

constexpr TrustRecord new_trust_record() noexcept { return {}; }

/// alpha / (alpha + beta)
constexpr double trustworthiness(const TrustRecord& r) noexcept {
  return r.alpha / (r.alpha + r.beta);
}

/// Subjective-logic uncertainty 2 / (alpha + beta); 1 at the prior.
constexpr double uncertainty(const TrustRecord& r) noexcept { return 2.0 / (r.alpha + r.beta); }

/// One draw from Beta(alpha, beta).
double thompson_sample(const TrustRecord& r, RandomSource& rng);

/// Keeps a trust value away from 0 and 1 where it enters a likelihood.
double clamp_trust(double tau) noexcept;

class TrustVector {
 public:
  TrustVector() = default;
  explicit TrustVector(std::size_t n_advisors) : records_(n_advisors) {}
  explicit TrustVector(std::vector<TrustRecord> records) : records_(std::move(records)) {}

  std::size_t size() const noexcept { return records_.size(); }

  const TrustRecord& operator[](AdvisorId id) const noexcept { return records_[id]; }
  TrustRecord& operator[](AdvisorId id) noexcept { return records_[id]; }

  /// Bounds-checked; throws UnknownAdvisorError.
  const TrustRecord& at(AdvisorId id) const;
  TrustRecord& at(AdvisorId id);

  double tau(AdvisorId id) const { return trustworthiness(at(id)); }
  double theta(AdvisorId id) const { return uncertainty(at(id)); }

  /// Throws UnknownAdvisorError if any member of the set is out of range.
  void check_covers(const AnswerSet& answers) const;

  const std::vector<TrustRecord>& records() const noexcept { return records_; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  friend bool operator==(const TrustVector&, const TrustVector&) = default;

 private:
  std::vector<TrustRecord> records_;
};

/// Sum over advisors of |tau_new - tau_old|. Vectors must have equal size.
double trust_l1_distance(const TrustVector& a, const TrustVector& b);

/// Adds the confidence as pseudo-evidence. With answer = positive, members of
/// P gain alpha and members of N gain beta; mirrored for a negative answer.
/// Throws UnknownAdvisorError on ids outside the vector and
/// std::invalid_argument when confidence is outside [0, 1].
void apply_confidence_update(TrustVector& trust, const AnswerSet& answers, Answer answer,
                             double confidence);

void to_json(nlohmann::json& j, const TrustRecord& r);
void from_json(const nlohmann::json& j, TrustRecord& r);
void to_json(nlohmann::json& j, const TrustVector& v);
void from_json(const nlohmann::json& j, TrustVector& v);

}  // namespace maddm
