#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maddm/types.hpp"

namespace maddm {

// One-coin Dawid-Skene model for binary answers: each advisor has a single
// accuracy, truths are a priori equally likely. Accuracies carry Laplace
// smoothing (+1/+2), i.e. a Beta(2,2) prior, so the M-step is a MAP update.

struct EmConfig {
  double tolerance = 1e-6;         // max posterior change between E-steps
  std::size_t max_iterations = 100;
  bool track_objective = true;     // off: EmState::objective stays empty
};

struct EmState {
  std::vector<double> accuracies;   // per advisor
  std::vector<double> posteriors;   // per decision, P(truth = positive)
  std::vector<double> log_odds;     // per decision, log P(+)/P(-)
  std::vector<double> objective;    // log posterior of the accuracies, per iteration
  std::size_t iterations = 0;
};

/// All accuracies set to `init_accuracy`. 0.5 would be a saddle point.
EmState em_initial_state(std::size_t n_advisors, double init_accuracy = 0.6);

/// Runs EM from `init.accuracies`. Advisors that never answered keep their
/// initial accuracy. Decisions with an empty answer set get posterior 0.5.
/// Throws std::invalid_argument if no decision has any answer, and
/// UnknownAdvisorError for ids beyond init.accuracies.
EmState em_aggregate(std::span<const AnswerSet> matrix, const EmState& init,
                     const EmConfig& config = {});

/// Marginal log-likelihood of the answers plus the Beta(2,2) log prior of
/// the accuracies (up to a constant). EM never decreases it.
double em_log_posterior(std::span<const AnswerSet> matrix, std::span<const double> accuracies);

}  // namespace maddm
