#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "maddm/bwve.hpp"
#include "maddm/trust.hpp"
#include "maddm/types.hpp"

namespace maddm {

enum class ReviewMode {
  // Each pass re-derives all evidence from the Beta(1,1) prior using the trust
  // vector from the end of the previous pass (EM-style fixed point).
  rebuild,
  // Each pass adds re-evaluated evidence on top of the running vector,
  // decision by decision, as the literal pseudocode reads.
  cumulative,
};

struct ReviewConfig {
  double threshold = 1e-3;       // stop once a pass moves trust by at most this (L1)
  std::size_t max_passes = 100;
  std::size_t frequency = 1;     // review after every k-th decision
  ReviewMode mode = ReviewMode::rebuild;

  void validate() const;
};

struct HistoryEntry {
  DecisionId id;
  AnswerSet answers;
};

// Past decisions of one run with their answer sets. Append-only.
class DecisionHistory {
 public:
  /// Throws std::invalid_argument on a duplicate id.
  void append(DecisionId id, AnswerSet answers);

  const std::vector<HistoryEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<HistoryEntry> entries_;
};

struct ReviewResult {
  TrustVector trust;
  std::size_t passes_used = 0;
  double final_delta_tau = 0.0;
};

/// Re-evaluates every past decision with the current trust vector until the
/// per-pass change falls to the threshold or max_passes is reached.
/// Throws UnknownAdvisorError if the history references an advisor the trust
/// vector does not cover.
ReviewResult review_update(const DecisionHistory& history, const TrustVector& trust,
                           const ReviewConfig& config, PriorOdds prior = {});

void to_json(nlohmann::json& j, const ReviewConfig& c);
void from_json(const nlohmann::json& j, ReviewConfig& c);

}  // namespace maddm
