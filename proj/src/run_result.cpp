#include "maddm/run_result.hpp"

namespace maddm {

double RunResult::book(const DecisionValue& value, Answer answer, Answer truth, double cost) {
  const bool correct = answer == truth;
  const double v = correct ? value.profit : -value.loss;
  revenue += v;
  total_cost += cost;
  utility = revenue - total_cost;
  correct_count += correct ? 1 : 0;
  ++n_decisions;
  return v - cost;
}

void to_json(nlohmann::json& j, const TraceRow& row) {
  j = nlohmann::json{{"decision_id", row.decision_id},
                     {"p_positive", row.p_positive},
                     {"answer", to_int(row.answer)},
                     {"confidence", row.confidence},
                     {"advisors_polled", row.hired.size()},
                     {"rounds", row.rounds},
                     {"hired", row.hired},
                     {"total_cost", row.total_cost},
                     {"correct", row.correct},
                     {"utility", row.utility}};
}

}  // namespace maddm
