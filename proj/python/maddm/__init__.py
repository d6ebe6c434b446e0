"""Trust-aware advisor selection and decision aggregation (C++ core)."""

from ._maddm import (
    AnswerSet,
    RandomSource,
    TrustRecord,
    TrustVector,
    UnknownAdvisorError,
    apply_confidence_update,
    bayesian_probabilities,
    decide_and_update,
    em_aggregate,
    ensemble_decide,
    execute_plan,
    generate_environment,
    mann_whitney_u,
    marginal_contribution,
    review_update,
    run_method,
    select_advisors,
    thompson_sample,
    weighted_voting_probabilities,
)

__all__ = [
    "AnswerSet",
    "RandomSource",
    "TrustRecord",
    "TrustVector",
    "UnknownAdvisorError",
    "apply_confidence_update",
    "bayesian_probabilities",
    "decide_and_update",
    "em_aggregate",
    "ensemble_decide",
    "execute_plan",
    "generate_environment",
    "mann_whitney_u",
    "marginal_contribution",
    "review_update",
    "run_method",
    "select_advisors",
    "thompson_sample",
    "weighted_voting_probabilities",
]
