"""RPS(1) preference functional and the two-state chain of iterated choice.

An agent repeatedly picks between prospects A and B.  The stimulus of the
prospect chosen last is its prior (by default its expected utility) plus the
utility of the payoff it just paid; the other prospect sits at its prior.  The
next choice is made with probability ``Phi(S_a) / (Phi(S_a) + Phi(S_b))``.
A is preferred to B when it is chosen more often in the long run, which
reduces to comparing the expected switch-away probabilities computed here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from rpsprefs.errors import (
    BadSpecString,
    DegenerateChain,
    DegenerateChainWarning,
    NegativeStimulus,
    ZeroDenominator,
    ZeroTotalStimulus,
)
from rpsprefs.lottery import LINEAR, Lottery, UtilityFn, expected_utility

#: Half-width of the indifference band on ``|lhs - rhs|``.
EPS_IND = 1e-12


class Relation(str, Enum):
    A_PREFERRED = "A_preferred"
    B_PREFERRED = "B_preferred"
    INDIFFERENT = "indifferent"

    def __str__(self):
        return self.value

    def flipped(self) -> Relation:
        if self is Relation.A_PREFERRED:
            return Relation.B_PREFERRED
        if self is Relation.B_PREFERRED:
            return Relation.A_PREFERRED
        return self


@dataclass(frozen=True)
class StimulusModel:
    """Transform applied to stimuli before they are turned into choice odds.

    ``identity`` uses the stimuli as they are and needs them non-negative;
    ``exponential`` is ``Phi(x) = exp(x / scale)``.
    """

    kind: str = "identity"
    scale: float | None = None

    def __post_init__(self):
        if self.kind == "identity":
            if self.scale is not None:
                raise ValueError("identity stimulus takes no scale")
        elif self.kind == "exponential":
            if self.scale is None or not self.scale > 0:
                raise ValueError("exponential stimulus needs scale d > 0")
        else:
            raise ValueError(f"unknown stimulus kind {self.kind!r}")

    @classmethod
    def exponential(cls, scale: float) -> StimulusModel:
        return cls("exponential", float(scale))

    @property
    def is_identity(self) -> bool:
        return self.kind == "identity"

    @property
    def spec(self) -> str:
        return "identity" if self.is_identity else f"exp:{self.scale!r}"

    def __call__(self, x: float) -> float:
        if self.is_identity:
            return x
        return math.exp(x / self.scale)

    def share(self, own: float, other: float) -> float:
        """``Phi(own) / (Phi(own) + Phi(other))``."""
        if self.is_identity:
            if own < 0.0 or other < 0.0:
                raise NegativeStimulus(f"stimuli ({own!r}, {other!r}) must be >= 0")
            total = own + other
            if total == 0.0:
                raise ZeroTotalStimulus("both stimuli are zero")
            return own / total
        return _logistic((own - other) / self.scale)


IDENTITY = StimulusModel()


def _logistic(t: float) -> float:
    if t >= 0.0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def parse_stimulus(text: str) -> StimulusModel:
    """Parse ``identity`` or ``exp:<d>``."""
    text = text.strip()
    if text == "identity":
        return IDENTITY
    head, _, rest = text.partition(":")
    if head == "exp" and rest:
        try:
            return StimulusModel.exponential(float(rest))
        except ValueError as exc:
            raise BadSpecString(f"bad phi spec {text!r}: {exc}") from None
    raise BadSpecString(f"bad phi spec {text!r}")


def decision_probability(s_a: float, s_b: float, phi: StimulusModel = IDENTITY) -> float:
    """Probability of choosing A given the current stimuli."""
    return phi.share(s_a, s_b)


@dataclass(frozen=True)
class ProspectPair:
    """Two prospects compared under one utility and stimulus model.

    ``prior_a``/``prior_b`` override the default stimulus levels, which are
    otherwise the expected utilities of ``a`` and ``b``.
    """

    a: Lottery
    b: Lottery
    utility: UtilityFn = LINEAR
    stimulus: StimulusModel = IDENTITY
    prior_a: float | None = None
    prior_b: float | None = None

    def priors(self) -> tuple[float, float]:
        pa = expected_utility(self.a, self.utility) if self.prior_a is None else self.prior_a
        pb = expected_utility(self.b, self.utility) if self.prior_b is None else self.prior_b
        return pa, pb

    def swapped(self) -> ProspectPair:
        return ProspectPair(self.b, self.a, self.utility, self.stimulus, self.prior_b, self.prior_a)


@dataclass(frozen=True)
class PreferenceOutcome:
    """Both sides of the comparison; A is preferred when ``lhs < rhs``.

    For the appendix form (``higher_is_better=True``) the sides are the
    expected stay probabilities and A is preferred when ``lhs > rhs``.
    """

    lhs: float
    rhs: float
    relation: Relation
    higher_is_better: bool = field(default=False, repr=False)

    @property
    def margin(self) -> float:
        return abs(self.lhs - self.rhs)


def _relation(lhs: float, rhs: float, eps: float, higher_is_better: bool = False) -> Relation:
    diff = lhs - rhs
    if abs(diff) <= eps:
        return Relation.INDIFFERENT
    a_wins = diff > 0 if higher_is_better else diff < 0
    return Relation.A_PREFERRED if a_wins else Relation.B_PREFERRED


def _increments(pair: ProspectPair):
    """Priors and the utilities of each support point, validated for identity Phi."""
    prior_a, prior_b = pair.priors()
    ua = [pair.utility(v) for v in pair.a.payoffs]
    ub = [pair.utility(v) for v in pair.b.payoffs]
    if pair.stimulus.is_identity:
        for name, prior in (("prior_a", prior_a), ("prior_b", prior_b)):
            if prior < 0.0:
                raise NegativeStimulus(f"{name}={prior!r} is negative")
        for label, lottery, own, utils in (("A", pair.a, prior_a, ua), ("B", pair.b, prior_b, ub)):
            for v, u in zip(lottery.payoffs, utils):
                if own + u < 0.0:
                    raise NegativeStimulus(
                        f"stimulus {own + u!r} of {label} after payoff {v!r} is negative"
                    )
                if prior_a + prior_b + u == 0.0:
                    raise ZeroDenominator(f"zero total stimulus after {label} pays {v!r}")
    return prior_a, prior_b, ua, ub


def rps1_sides(pair: ProspectPair, eps: float = EPS_IND) -> PreferenceOutcome:
    """Expected switch-away probabilities from A (lhs) and from B (rhs).

    ``lhs = E[Phi(U_b) / (Phi(U_b) + Phi(U_a + U(X)))]`` and symmetrically for
    ``rhs``; with identity Phi this is ``E[U_b / (U_a + U_b + U(X))]``.
    """
    prior_a, prior_b, ua, ub = _increments(pair)
    pa, pb = pair.a.probabilities, pair.b.probabilities
    if pair.stimulus.is_identity:
        lhs = math.fsum(p * (prior_b / (prior_a + prior_b + u)) for p, u in zip(pa, ua))
        rhs = math.fsum(p * (prior_a / (prior_a + prior_b + u)) for p, u in zip(pb, ub))
    else:
        share = pair.stimulus.share
        lhs = math.fsum(p * share(prior_b, prior_a + u) for p, u in zip(pa, ua))
        rhs = math.fsum(p * share(prior_a, prior_b + u) for p, u in zip(pb, ub))
    return PreferenceOutcome(lhs, rhs, _relation(lhs, rhs, eps))


def rps1_residual(pair: ProspectPair) -> float:
    """``lhs - rhs`` of :func:`rps1_sides`, kept accurate when both sides near 1.

    With exponential Phi and stimulus gaps of many ``d`` the switch-away
    probabilities round to 1.  Their difference equals ``stay_b - stay_a``,
    and the stay probabilities are small and carry full relative precision.
    """
    if pair.stimulus.is_identity:
        out = rps1_sides(pair, eps=0.0)
        return out.lhs - out.rhs
    prior_a, prior_b, ua, ub = _increments(pair)
    share = pair.stimulus.share
    stay_a = math.fsum(p * share(prior_a + u, prior_b) for p, u in zip(pair.a.probabilities, ua))
    stay_b = math.fsum(p * share(prior_b + u, prior_a) for p, u in zip(pair.b.probabilities, ub))
    if stay_a < 0.5 and stay_b < 0.5:
        return stay_b - stay_a
    out = rps1_sides(pair, eps=0.0)
    return out.lhs - out.rhs


def rps1_sides_appendix_form(pair: ProspectPair, eps: float = EPS_IND) -> PreferenceOutcome:
    """Expected stay probabilities ``E[(U_a + U(X)) / (U_a + U_b + U(X))]`` etc.

    Identity Phi only.  A is preferred when ``lhs > rhs``.
    """
    if not pair.stimulus.is_identity:
        raise ValueError("the stay-probability form is defined for identity phi only")
    prior_a, prior_b, ua, ub = _increments(pair)
    pa, pb = pair.a.probabilities, pair.b.probabilities
    lhs = math.fsum(p * ((prior_a + u) / (prior_a + prior_b + u)) for p, u in zip(pa, ua))
    rhs = math.fsum(p * ((prior_b + u) / (prior_a + prior_b + u)) for p, u in zip(pb, ub))
    return PreferenceOutcome(lhs, rhs, _relation(lhs, rhs, eps, higher_is_better=True), True)


@dataclass(frozen=True)
class MarkovModel:
    """Two-state chain of iterated choice and its stationary law."""

    stay_a: float
    stay_b: float
    stationary_p: float
    stationary_q: float
    ergodic: bool = True

    def transition_matrix(self) -> np.ndarray:
        """Column-stochastic ``T`` with ``(p, q) = T (p, q)``."""
        return np.array(
            [[self.stay_a, 1.0 - self.stay_b], [1.0 - self.stay_a, self.stay_b]]
        )

    def fixed_point_residual(self) -> float:
        p, q = self.stationary_p, self.stationary_q
        return abs(self.stay_a * p + (1.0 - self.stay_b) * q - p)


def markov_model(pair: ProspectPair) -> MarkovModel:
    """Exact chain for the RPS(1) process on ``pair``.

    An absorbing state (stay probability 1) yields a point-mass stationary law
    flagged ``ergodic=False`` and a :class:`DegenerateChainWarning`.
    """
    prior_a, prior_b, ua, ub = _increments(pair)
    share = pair.stimulus.share
    stay_a = math.fsum(p * share(prior_a + u, prior_b) for p, u in zip(pair.a.probabilities, ua))
    stay_b = math.fsum(p * share(prior_b + u, prior_a) for p, u in zip(pair.b.probabilities, ub))
    leave_a, leave_b = 1.0 - stay_a, 1.0 - stay_b
    if leave_a == 0.0 and leave_b == 0.0:
        raise DegenerateChain("both states are absorbing")
    ergodic = leave_a > 0.0 and leave_b > 0.0
    if not ergodic:
        warnings.warn(
            f"choice chain is not ergodic (stay_a={stay_a!r}, stay_b={stay_b!r})",
            DegenerateChainWarning,
            stacklevel=2,
        )
    p = leave_b / (leave_a + leave_b)
    return MarkovModel(stay_a, stay_b, p, 1.0 - p, ergodic)


def baseline_choice_probability(pair: ProspectPair) -> float:
    """Choice probability of A from the priors alone, with no payoff history."""
    prior_a, prior_b = pair.priors()
    return pair.stimulus.share(prior_a, prior_b)
