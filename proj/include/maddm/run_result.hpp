#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "maddm/bwve.hpp"
#include "maddm/selection.hpp"
#include "maddm/types.hpp"

namespace maddm {

// Per-decision record for run traces.
struct TraceRow {
  DecisionId decision_id = 0;
  double p_positive = 0.5;
  Answer answer = Answer::negative;
  double confidence = 0.0;
  std::size_t rounds = 0;
  std::vector<AdvisorId> hired;  // hire order
  double total_cost = 0.0;
  bool correct = false;
  double utility = 0.0;  // v_d - C_d
};

struct RunResult {
  std::string method;
  double utility = 0.0;      // revenue - total_cost
  double revenue = 0.0;      // sum of +profit / -loss
  double total_cost = 0.0;
  std::size_t correct_count = 0;
  std::size_t n_decisions = 0;
  std::size_t hired_count = 0;
  std::vector<TraceRow> trace;  // filled only when tracing is requested

  /// Books one decision. Returns the decision's utility.
  double book(const DecisionValue& value, Answer answer, Answer truth, double cost);
};

void to_json(nlohmann::json& j, const TraceRow& row);

}  // namespace maddm
