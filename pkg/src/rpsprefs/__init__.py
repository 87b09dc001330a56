"""Adaptive RPS(1)/RPS(k) decision model: preferences, simulation and solvers."""

from rpsprefs.engine import (
    EPS_IND,
    IDENTITY,
    MarkovModel,
    PreferenceOutcome,
    ProspectPair,
    Relation,
    StimulusModel,
    baseline_choice_probability,
    decision_probability,
    markov_model,
    rps1_sides,
    rps1_sides_appendix_form,
)
from rpsprefs.lottery import (
    LINEAR,
    Linear,
    Lottery,
    MixtureSpec,
    Power,
    ScaledLog,
    Shifted,
    UtilityFn,
    canonicalize,
    expected_utility,
    fsd_dominates,
    mix,
)

__version__ = "0.1.0"

__all__ = [
    "EPS_IND",
    "IDENTITY",
    "LINEAR",
    "Linear",
    "Lottery",
    "MarkovModel",
    "MixtureSpec",
    "Power",
    "PreferenceOutcome",
    "ProspectPair",
    "Relation",
    "ScaledLog",
    "Shifted",
    "StimulusModel",
    "UtilityFn",
    "baseline_choice_probability",
    "canonicalize",
    "decision_probability",
    "expected_utility",
    "fsd_dominates",
    "markov_model",
    "mix",
    "rps1_sides",
    "rps1_sides_appendix_form",
]
