#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace maddm {

using AdvisorId = std::size_t;
using DecisionId = std::size_t;

enum class Answer : int { negative = -1, positive = 1 };

constexpr Answer opposite(Answer a) noexcept {
  return a == Answer::positive ? Answer::negative : Answer::positive;
}

constexpr int to_int(Answer a) noexcept { return static_cast<int>(a); }

/// Raised when an answer set or history references an advisor the trust
/// vector does not cover.
class UnknownAdvisorError : public std::out_of_range {
 public:
  explicit UnknownAdvisorError(AdvisorId id)
      : std::out_of_range("unknown advisor id " + std::to_string(id)) {}
};

// Partition of the consulted advisors of one decision by their binary answer.
// Members keep insertion (hire) order.
class AnswerSet {
 public:
  AnswerSet() = default;
  AnswerSet(std::vector<AdvisorId> positives, std::vector<AdvisorId> negatives);

  /// Throws std::invalid_argument if the advisor already answered.
  void add(AdvisorId id, Answer answer);

  const std::vector<AdvisorId>& positives() const noexcept { return positives_; }
  const std::vector<AdvisorId>& negatives() const noexcept { return negatives_; }
  const std::vector<AdvisorId>& members(Answer side) const noexcept {
    return side == Answer::positive ? positives_ : negatives_;
  }

  std::size_t size() const noexcept { return positives_.size() + negatives_.size(); }
  bool empty() const noexcept { return positives_.empty() && negatives_.empty(); }
  bool contains(AdvisorId id) const noexcept;

  /// Every answer inverted (P and N swapped).
  AnswerSet flipped() const { return AnswerSet(negatives_, positives_); }

  friend bool operator==(const AnswerSet&, const AnswerSet&) = default;

 private:
  std::vector<AdvisorId> positives_;
  std::vector<AdvisorId> negatives_;
};

}  // namespace maddm
