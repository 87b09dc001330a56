"""Finite lotteries, VNM utility families, mixtures and stochastic dominance.

A :class:`Lottery` is always canonical: payoffs strictly increasing, every
probability strictly positive and the probabilities summing to one.  Build
lotteries through :func:`canonicalize` (or :meth:`Lottery.of`) rather than the
raw constructor.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from itertools import accumulate
from pathlib import Path
from typing import Iterable, Sequence

from rpsprefs.errors import (
    BadSpecString,
    DomainViolation,
    EmptySupport,
    NegativeProbability,
    ProbabilitySumOutOfTolerance,
)

#: Allowed deviation of raw input probabilities from a total of one.
INPUT_SUM_TOLERANCE = 1e-9

_EPS = 2.0**-52


@dataclass(frozen=True)
class Lottery:
    """Finite discrete payoff distribution in canonical form."""

    payoffs: tuple[float, ...]
    probabilities: tuple[float, ...]

    @classmethod
    def of(cls, *outcomes: tuple[float, float]) -> Lottery:
        return canonicalize(outcomes)

    @classmethod
    def sure(cls, value: float) -> Lottery:
        return cls((float(value),), (1.0,))

    @property
    def outcomes(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.payoffs, self.probabilities))

    @property
    def is_sure(self) -> bool:
        return len(self.payoffs) == 1

    @property
    def min_payoff(self) -> float:
        return self.payoffs[0]

    @property
    def max_payoff(self) -> float:
        return self.payoffs[-1]

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.outcomes)

    def cdf(self, value: float) -> float:
        return math.fsum(p for v, p in self.outcomes if v <= value)

    def shifted(self, offset: float) -> Lottery:
        """Same probabilities, every payoff moved by ``offset``."""
        return canonicalize((v + offset, p) for v, p in self.outcomes)

    def __len__(self) -> int:
        return len(self.payoffs)


def canonicalize(raw: Iterable[tuple[float, float]]) -> Lottery:
    """Merge duplicate payoffs, drop zero-probability outcomes, sort, renormalize.

    Raises:
        NegativeProbability: if any probability is below zero.
        ProbabilitySumOutOfTolerance: if the probabilities do not sum to one
            within :data:`INPUT_SUM_TOLERANCE`.
        EmptySupport: if no outcome carries positive probability.
    """
    merged: dict[float, list[float]] = {}
    for payoff, prob in raw:
        payoff, prob = float(payoff), float(prob)
        if not (math.isfinite(payoff) and math.isfinite(prob)):
            raise ValueError(f"non-finite outcome ({payoff!r}, {prob!r})")
        if prob < 0.0:
            raise NegativeProbability(f"probability {prob!r} for payoff {payoff!r}")
        merged.setdefault(payoff, []).append(prob)
    if not merged:
        raise EmptySupport("lottery has no outcomes")

    total = math.fsum(p for probs in merged.values() for p in probs)
    if abs(total - 1.0) > INPUT_SUM_TOLERANCE:
        raise ProbabilitySumOutOfTolerance(f"probabilities sum to {total!r}")

    support = sorted(
        (payoff, math.fsum(probs)) for payoff, probs in merged.items() if math.fsum(probs) > 0.0
    )
    if not support:
        raise EmptySupport("every outcome has zero probability")

    payoffs = [v for v, _ in support]
    probs = [p for _, p in support]
    # sums within a few ulps of one are left alone, which keeps this idempotent
    if abs(total - 1.0) > 4 * _EPS:
        probs = [p / total for p in probs]
        # absorb the rounding residue into the largest mass
        big = max(range(len(probs)), key=probs.__getitem__)
        probs[big] = 1.0 - math.fsum(p for i, p in enumerate(probs) if i != big)
    return Lottery(tuple(payoffs), tuple(probs))


@dataclass(frozen=True)
class MixtureSpec:
    weight: float
    component_a: Lottery
    component_b: Lottery

    def __post_init__(self):
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"mixture weight {self.weight!r} outside [0, 1]")


def mix(spec: MixtureSpec) -> Lottery:
    """Compound lottery: ``component_a`` with probability ``weight``, else ``component_b``."""
    w = spec.weight
    return canonicalize(
        [(v, w * p) for v, p in spec.component_a.outcomes]
        + [(v, (1.0 - w) * p) for v, p in spec.component_b.outcomes]
    )


def fsd_dominates(a: Lottery, b: Lottery) -> bool:
    """True iff ``a`` first-order stochastically dominates ``b``.

    ``CDF_a <= CDF_b`` on the union of supports, strictly at some point.  The
    CDFs are built in exact rational arithmetic and normalized by total mass,
    so float residue in the probabilities cannot create or hide dominance and
    the relation is exactly irreflexive and transitive.
    """
    grid = sorted(set(a.payoffs) | set(b.payoffs))
    strict = False
    for fa, fb in zip(_cdf_on(a, grid), _cdf_on(b, grid)):
        if fa > fb:
            return False
        strict = strict or fa < fb
    return strict


def _cdf_on(lottery: Lottery, grid: Sequence[float]) -> list[Fraction]:
    masses = {v: Fraction(p) for v, p in lottery.outcomes}
    cum = list(accumulate(masses.get(v, Fraction(0)) for v in grid))
    return [c / cum[-1] for c in cum]


# --------------------------------------------------------------------------
# utility functions
# --------------------------------------------------------------------------


class UtilityFn:
    """Monotone VNM utility.  Subclasses are small frozen dataclasses."""

    strictly_increasing = True

    def __call__(self, c: float) -> float:
        self.check_domain(c)
        return self._value(c)

    def _value(self, c: float) -> float:
        raise NotImplementedError

    def inverse(self, u: float) -> float:
        raise NotImplementedError

    def check_domain(self, c: float) -> None:
        pass

    @property
    def spec(self) -> str:
        """Spec string understood by :func:`parse_utility`."""
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(UtilityFn):
    def _value(self, c):
        return float(c)

    def inverse(self, u):
        return float(u)

    @property
    def spec(self):
        return "linear"


@dataclass(frozen=True)
class Power(UtilityFn):
    """``(1 + c)**alpha - 1`` on ``c >= -1``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("power utility needs alpha > 0")

    def check_domain(self, c):
        if 1.0 + c < 0.0:
            raise DomainViolation(f"power utility undefined at c={c!r} (needs c >= -1)")

    def _value(self, c):
        return (1.0 + c) ** self.alpha - 1.0

    def inverse(self, u):
        if 1.0 + u < 0.0:
            raise DomainViolation(f"utility level {u!r} below the range of power utility")
        return (1.0 + u) ** (1.0 / self.alpha) - 1.0

    @property
    def spec(self):
        return f"power:{self.alpha!r}"


@dataclass(frozen=True)
class ScaledLog(UtilityFn):
    """``log(1 + r c) / log(1 + r)``, so that U(0) = 0 and U(1) = 1."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("scaled-log utility needs rate > 0")

    def check_domain(self, c):
        if 1.0 + self.rate * c <= 0.0:
            raise DomainViolation(f"scaled-log utility undefined at c={c!r}")

    def _value(self, c):
        return math.log1p(self.rate * c) / math.log1p(self.rate)

    def inverse(self, u):
        return math.expm1(u * math.log1p(self.rate)) / self.rate

    @property
    def spec(self):
        return f"log:{self.rate!r}"


@dataclass(frozen=True)
class Shifted(UtilityFn):
    """``base(c) + offset``; the framing shift of a utility scale."""

    base: UtilityFn
    offset: float

    @property
    def strictly_increasing(self):
        return self.base.strictly_increasing

    def check_domain(self, c):
        self.base.check_domain(c)

    def _value(self, c):
        return self.base._value(c) + self.offset

    def inverse(self, u):
        return self.base.inverse(u - self.offset)

    @property
    def spec(self):
        return f"shift:{self.base.spec}:{self.offset!r}"


LINEAR = Linear()


def parse_utility(text: str) -> UtilityFn:
    """Parse ``linear``, ``power:<alpha>``, ``log:<rate>`` or ``shift:<base>:<a>``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "linear" and not rest:
            return LINEAR
        if head == "power" and rest:
            return Power(float(rest))
        if head == "log" and rest:
            return ScaledLog(float(rest))
        if head == "shift" and ":" in rest:
            base, _, offset = rest.rpartition(":")
            return Shifted(parse_utility(base), float(offset))
    except (ValueError, BadSpecString) as exc:
        raise BadSpecString(f"bad utility spec {text!r}: {exc}") from None
    raise BadSpecString(f"bad utility spec {text!r}")


def expected_utility(lottery: Lottery, utility: UtilityFn) -> float:
    """``sum p_i U(v_i)``; raises :class:`DomainViolation` outside U's domain."""
    return math.fsum(p * utility(v) for v, p in lottery.outcomes)


# --------------------------------------------------------------------------
# text format
# --------------------------------------------------------------------------


def parse_lottery_text(text: str) -> Lottery:
    """Parse ``payoff,probability`` lines; ``#`` starts a comment."""
    raw = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise ValueError(f"line {lineno}: expected 'payoff,probability', got {line!r}")
        try:
            raw.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: non-numeric field in {line!r}") from None
    return canonicalize(raw)


def load_lottery(path: str | Path) -> Lottery:
    return parse_lottery_text(Path(path).read_text())


def format_lottery_text(lottery: Lottery) -> str:
    return "".join(f"{v!r},{p!r}\n" for v, p in lottery.outcomes)
