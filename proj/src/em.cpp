#include "maddm/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maddm {

namespace {

double clamp_accuracy(double a) { return std::clamp(a, 1e-12, 1.0 - 1e-12); }

void check_ids(std::span<const AnswerSet> matrix, std::size_t n_advisors) {
  bool any = false;
  for (const auto& answers : matrix) {
    for (auto id : answers.positives()) {
      if (id >= n_advisors) throw UnknownAdvisorError(id);
    }
    for (auto id : answers.negatives()) {
      if (id >= n_advisors) throw UnknownAdvisorError(id);
    }
    any = any || !answers.empty();
  }
  if (!any) throw std::invalid_argument("EM needs at least one answered decision");
}

// Positive-class posterior from log-odds. Computed from |s| so that
// negating s yields exactly 1 - p.
double posterior_from_log_odds(double s) {
  const double m = 1.0 / (1.0 + std::exp(-std::abs(s)));
  return s >= 0.0 ? m : 1.0 - m;
}

void e_step(std::span<const AnswerSet> matrix, std::span<const double> accuracies,
            EmState& state) {
  std::vector<double> weight(accuracies.size());
  for (std::size_t x = 0; x < accuracies.size(); ++x) {
    const double a = clamp_accuracy(accuracies[x]);
    weight[x] = std::log(a) - std::log1p(-a);
  }
  state.log_odds.assign(matrix.size(), 0.0);
  state.posteriors.assign(matrix.size(), 0.5);
  for (std::size_t d = 0; d < matrix.size(); ++d) {
    double pos = 0.0;
    double neg = 0.0;
    for (auto id : matrix[d].positives()) pos += weight[id];
    for (auto id : matrix[d].negatives()) neg += weight[id];
    state.log_odds[d] = pos - neg;
    state.posteriors[d] = posterior_from_log_odds(state.log_odds[d]);
  }
}

// Both the M-step and the convergence test read posteriors through the
// log-odds so that a flipped matrix reproduces every accuracy bit for bit.
void m_step(std::span<const AnswerSet> matrix, std::span<const double> log_odds,
            std::vector<double>& accuracies) {
  std::vector<double> correct(accuracies.size(), 0.0);
  std::vector<double> seen(accuracies.size(), 0.0);
  for (std::size_t d = 0; d < matrix.size(); ++d) {
    for (auto id : matrix[d].positives()) {
      correct[id] += posterior_from_log_odds(log_odds[d]);
      seen[id] += 1.0;
    }
    for (auto id : matrix[d].negatives()) {
      correct[id] += posterior_from_log_odds(-log_odds[d]);
      seen[id] += 1.0;
    }
  }
  for (std::size_t x = 0; x < accuracies.size(); ++x) {
    if (seen[x] > 0.0) accuracies[x] = (correct[x] + 1.0) / (seen[x] + 2.0);
  }
}

// |P(+) now - P(+) before|, evaluated on the side of the previous estimate.
double posterior_change(double s, double s_prev) {
  if (s_prev > 0.0 || (s_prev == 0.0 && s >= 0.0)) {
    return std::abs(posterior_from_log_odds(s) - posterior_from_log_odds(s_prev));
  }
  return std::abs(posterior_from_log_odds(-s) - posterior_from_log_odds(-s_prev));
}

}  // namespace

EmState em_initial_state(std::size_t n_advisors, double init_accuracy) {
  if (!(init_accuracy > 0.0 && init_accuracy < 1.0)) {
    throw std::invalid_argument("EM initial accuracy must lie in (0, 1)");
  }
  EmState s;
  s.accuracies.assign(n_advisors, init_accuracy);
  return s;
}

double em_log_posterior(std::span<const AnswerSet> matrix, std::span<const double> accuracies) {
  std::vector<double> log_right(accuracies.size());
  std::vector<double> log_wrong(accuracies.size());
  double total = 0.0;
  for (std::size_t x = 0; x < accuracies.size(); ++x) {
    const double a = clamp_accuracy(accuracies[x]);
    log_right[x] = std::log(a);
    log_wrong[x] = std::log1p(-a);
  }
  for (const auto& answers : matrix) {
    // Per-side sums combined symmetrically, so flipping every answer swaps
    // the two likelihoods exactly.
    double pos_right = 0.0;
    double pos_wrong = 0.0;
    double neg_right = 0.0;
    double neg_wrong = 0.0;
    for (auto id : answers.positives()) {
      pos_right += log_right[id];
      pos_wrong += log_wrong[id];
    }
    for (auto id : answers.negatives()) {
      neg_right += log_right[id];
      neg_wrong += log_wrong[id];
    }
    const double if_pos = pos_right + neg_wrong;
    const double if_neg = neg_right + pos_wrong;
    const double m = std::max(if_pos, if_neg);
    total += m + std::log(0.5 * std::exp(if_pos - m) + 0.5 * std::exp(if_neg - m));
  }
  for (std::size_t x = 0; x < accuracies.size(); ++x) total += log_right[x] + log_wrong[x];
  return total;
}

EmState em_aggregate(std::span<const AnswerSet> matrix, const EmState& init,
                     const EmConfig& config) {
  check_ids(matrix, init.accuracies.size());
  EmState state;
  state.accuracies = init.accuracies;
  if (config.track_objective) state.objective.push_back(em_log_posterior(matrix, state.accuracies));

  std::vector<double> previous;
  bool converged = false;
  while (state.iterations < config.max_iterations) {
    e_step(matrix, state.accuracies, state);
    if (!previous.empty()) {
      double change = 0.0;
      for (std::size_t d = 0; d < previous.size(); ++d) {
        change = std::max(change, posterior_change(state.log_odds[d], previous[d]));
      }
      if (change < config.tolerance) {
        converged = true;
        break;
      }
    }
    m_step(matrix, state.log_odds, state.accuracies);
    if (config.track_objective) {
      state.objective.push_back(em_log_posterior(matrix, state.accuracies));
    }
    previous = state.log_odds;
    ++state.iterations;
  }
  if (!converged) e_step(matrix, state.accuracies, state);
  return state;
}

}  // namespace maddm
