#include "maddm/types.hpp"

#include <algorithm>

namespace maddm {

AnswerSet::AnswerSet(std::vector<AdvisorId> positives, std::vector<AdvisorId> negatives) {
  for (auto id : positives) add(id, Answer::positive);
  for (auto id : negatives) add(id, Answer::negative);
}

void AnswerSet::add(AdvisorId id, Answer answer) {
  if (contains(id)) {
    throw std::invalid_argument("advisor " + std::to_string(id) + " already answered");
  }
  (answer == Answer::positive ? positives_ : negatives_).push_back(id);
}

bool AnswerSet::contains(AdvisorId id) const noexcept {
  return std::find(positives_.begin(), positives_.end(), id) != positives_.end() ||
         std::find(negatives_.begin(), negatives_.end(), id) != negatives_.end();
}

}  // namespace maddm
