"""Solvers and experiments built on the RPS(1) preference functional.

Certainty equivalents are found by bisection on the indifference residual
``lhs - rhs`` of :func:`rpsprefs.engine.rps1_sides` comparing a sure amount
(prospect A) against the lottery (prospect B).  Every search that claims a
witness re-evaluates it with direct functional calls before returning.

Most entry points take ``rule="rps"`` or ``rule="eu"``; the latter swaps in
plain expected-utility comparison and serves as the control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from rpsprefs.engine import (
    EPS_IND,
    IDENTITY,
    PreferenceOutcome,
    ProspectPair,
    Relation,
    StimulusModel,
    _relation,
    rps1_residual,
    rps1_sides,
)
from rpsprefs.errors import MixedSignPayoffs, NonConvergence, NoSignChange, RPSError
from rpsprefs.lottery import (
    LINEAR,
    Lottery,
    MixtureSpec,
    Shifted,
    UtilityFn,
    canonicalize,
    expected_utility,
    mix,
)
from rpsprefs.simulator import SimConfig, frequency_preference

#: Largest indifference residual accepted for a solved curve point.
CURVE_RESIDUAL_LIMIT = 1e-9

#: Relative tolerance for "equal expected utility" in intransitivity witnesses.
EU_MATCH_TOLERANCE = 1e-9

RULES = ("rps", "eu")


def eu_sides(pair: ProspectPair, eps: float = EPS_IND) -> PreferenceOutcome:
    """Expected-utility comparison in the same ``lhs < rhs`` convention.

    ``lhs = EU(B)`` and ``rhs = EU(A)``, so A is preferred iff EU(A) > EU(B).
    """
    eu_a = expected_utility(pair.a, pair.utility)
    eu_b = expected_utility(pair.b, pair.utility)
    return PreferenceOutcome(eu_b, eu_a, _relation(eu_b, eu_a, eps))


def preference(pair: ProspectPair, rule: str = "rps") -> PreferenceOutcome:
    if rule == "rps":
        return rps1_sides(pair)
    if rule == "eu":
        return eu_sides(pair)
    raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")


def compare(
    a: Lottery,
    b: Lottery,
    utility: UtilityFn = LINEAR,
    stimulus: StimulusModel = IDENTITY,
    rule: str = "rps",
) -> PreferenceOutcome:
    return preference(ProspectPair(a, b, utility, stimulus), rule)


# --------------------------------------------------------------------------
# root finding
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverSettings:
    """Bisection controls.

    The loop runs until the bracket is narrower than ``tolerance`` and the
    residual is within ``residual_target``, or until the bracket cannot be
    split further in floating point.
    """

    bracket: tuple[float, float] | None = None
    tolerance: float = 1e-10
    max_iterations: int = 200
    residual_target: float = EPS_IND

    def __post_init__(self):
        if self.bracket is not None and not self.bracket[0] < self.bracket[1]:
            raise ValueError(f"bracket must satisfy low < high, got {self.bracket!r}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class Root:
    value: float
    residual: float
    iterations: int


def bisect(f: Callable[[float], float], lo: float, hi: float, settings: SolverSettings) -> Root:
    """Sign-change bisection on ``[lo, hi]``."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return Root(lo, 0.0, 0)
    if f_hi == 0.0:
        return Root(hi, 0.0, 0)
    if (f_lo > 0) == (f_hi > 0):
        raise NoSignChange(f"residual has the same sign at {lo!r} ({f_lo:.3g}) and {hi!r} ({f_hi:.3g})")

    for it in range(1, settings.max_iterations + 1):
        mid = lo + 0.5 * (hi - lo)
        if not lo < mid < hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return Root(mid, 0.0, it)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo <= settings.tolerance and min(abs(f_lo), abs(f_hi)) <= settings.residual_target:
            break
    else:
        if hi - lo > settings.tolerance:
            raise NonConvergence(f"bracket still {hi - lo:.3g} wide after {settings.max_iterations} iterations")
        it = settings.max_iterations

    value, residual = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    if abs(residual) > CURVE_RESIDUAL_LIMIT:
        raise NonConvergence(f"residual {residual:.3g} at {value!r} exceeds {CURVE_RESIDUAL_LIMIT}")
    return Root(value, residual, it)


def solve_indifference(
    make_a: Callable[[float], Lottery],
    b: Lottery,
    utility: UtilityFn = LINEAR,
    stimulus: StimulusModel = IDENTITY,
    settings: SolverSettings | None = None,
    rule: str = "rps",
    payoff_range: tuple[float, float] | None = None,
) -> Root:
    """Find ``c`` with ``make_a(c) ~ b``.

    The bracket is ``settings.bracket`` if given, else ``payoff_range`` (the
    payoff range of ``b`` by default).  A user bracket without a sign change is
    widened to cover the payoff range before giving up.
    """
    settings = settings or DEFAULT_SETTINGS
    p_lo, p_hi = payoff_range or (b.min_payoff, b.max_payoff)

    def residual(c: float) -> float:
        pair = ProspectPair(make_a(c), b, utility, stimulus)
        if rule == "rps":
            return rps1_residual(pair)
        out = preference(pair, rule)
        return out.lhs - out.rhs

    if settings.bracket is not None:
        lo, hi = settings.bracket
        try:
            return bisect(residual, lo, hi, settings)
        except NoSignChange:
            wide = (min(lo, p_lo), max(hi, p_hi))
            if wide == (lo, hi):
                raise
            return bisect(residual, *wide, settings)
    if p_lo == p_hi:
        r = residual(p_lo)
        if abs(r) <= settings.residual_target:
            return Root(p_lo, r, 0)
        raise NoSignChange(f"degenerate bracket at {p_lo!r} with residual {r:.3g}")
    return bisect(residual, p_lo, p_hi, settings)


def certainty_equivalent_root(
    lottery: Lottery,
    utility: UtilityFn = LINEAR,
    phi: StimulusModel = IDENTITY,
    settings: SolverSettings | None = None,
    rule: str = "rps",
) -> Root:
    if lottery.is_sure:
        return Root(lottery.payoffs[0], 0.0, 0)
    return solve_indifference(Lottery.sure, lottery, utility, phi, settings, rule)


def certainty_equivalent(
    lottery: Lottery,
    utility: UtilityFn = LINEAR,
    phi: StimulusModel = IDENTITY,
    settings: SolverSettings | None = None,
    rule: str = "rps",
) -> float:
    """Sure amount indifferent to ``lottery`` under the chosen rule."""
    return certainty_equivalent_root(lottery, utility, phi, settings, rule).value


def eu_certainty_equivalent(lottery: Lottery, utility: UtilityFn = LINEAR) -> float:
    """Closed-form EU certainty equivalent ``U^-1(E[U(X)])``."""
    return utility.inverse(expected_utility(lottery, utility))


class RiskAttitude(str, Enum):
    CONSERVATIVE = "conservative"
    RISK_SEEKING = "risk_seeking"
    NEUTRAL = "neutral"

    def __str__(self):
        return self.value


def risk_attitude_check(
    lottery: Lottery, phi: StimulusModel, settings: SolverSettings | None = None
) -> RiskAttitude:
    """Compare the RPS(1) certainty equivalent with the mean under linear utility.

    Raises:
        MixedSignPayoffs: the lottery pays both gains and losses.
    """
    if phi.is_identity:
        raise ValueError("risk attitude check needs an exponential stimulus model")
    if lottery.is_sure:
        return RiskAttitude.NEUTRAL
    if lottery.min_payoff < 0.0 < lottery.max_payoff:
        raise MixedSignPayoffs(f"payoffs span {lottery.min_payoff!r}..{lottery.max_payoff!r}")
    ce = certainty_equivalent(lottery, LINEAR, phi, settings)
    eu = lottery.mean()
    if ce < eu:
        return RiskAttitude.CONSERVATIVE
    if ce > eu:
        return RiskAttitude.RISK_SEEKING
    return RiskAttitude.NEUTRAL


# --------------------------------------------------------------------------
# curves and the Allais region
# --------------------------------------------------------------------------


def gains_family(x: float) -> Lottery:
    """Pays 1 with probability ``x``, else 0."""
    return canonicalize([(0.0, 1.0 - x), (1.0, x)])


def losses_family(x: float) -> Lottery:
    """Pays -1 with probability ``x``, else 0."""
    return canonicalize([(0.0, 1.0 - x), (-1.0, x)])


FAMILIES: dict[str, Callable[[float], Lottery]] = {"gains": gains_family, "losses": losses_family}


def probability_grid(n: int = 101) -> list[float]:
    """``n`` evenly spaced points strictly inside (0, 1)."""
    return np.linspace(0.0, 1.0, n + 2)[1:-1].tolist()


def payoff_grid(n: int = 101, low: float = 0.0, high: float = 1.0) -> list[float]:
    return np.linspace(low, high, n).tolist()


@dataclass(frozen=True)
class CurvePoint:
    c: float
    x: float
    side: str = "c"
    residual: float = 0.0
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def record(self) -> dict:
        return {"c": self.c, "x": self.x, "side": self.side, "residual": self.residual}


def _solve_point(x: float, solve: Callable[[], Root]) -> CurvePoint:
    try:
        root = solve()
    except RPSError as exc:
        return CurvePoint(math.nan, x, "c", math.nan, f"{type(exc).__name__}: {exc}")
    return CurvePoint(root.value, x, "c", root.residual)


def indifference_curve(
    family: Callable[[float], Lottery] | str,
    utility: UtilityFn,
    phi: StimulusModel = IDENTITY,
    grid: Sequence[float] | None = None,
    settings: SolverSettings | None = None,
    rule: str = "rps",
) -> list[CurvePoint]:
    """Certainty equivalent of ``family(x)`` at each grid point.

    Points where the solver fails carry ``error`` and a NaN ``c``.
    """
    if isinstance(family, str):
        family = FAMILIES[family]
    grid = probability_grid() if grid is None else grid
    return [
        _solve_point(x, lambda x=x: certainty_equivalent_root(family(x), utility, phi, settings, rule))
        for x in grid
    ]


def _allais_pairs(c, x, weight, family):
    lx = family(x)
    sure_c = Lottery.sure(c)
    zero = Lottery.sure(0.0)
    direct = (sure_c, lx)
    diluted = (
        mix(MixtureSpec(weight, sure_c, zero)),
        mix(MixtureSpec(weight, lx, zero)),
    )
    return direct, diluted


def allais_cell(
    c: float,
    x: float,
    weight: float,
    utility: UtilityFn,
    phi: StimulusModel = IDENTITY,
    rule: str = "rps",
    family: Callable[[float], Lottery] = gains_family,
) -> tuple[PreferenceOutcome, PreferenceOutcome]:
    """Outcomes of sure-c vs L_x and of the two diluted prospects."""
    direct, diluted = _allais_pairs(c, x, weight, family)
    return (
        preference(ProspectPair(*direct, utility, phi), rule),
        preference(ProspectPair(*diluted, utility, phi), rule),
    )


def _is_reversal(direct: PreferenceOutcome, diluted: PreferenceOutcome) -> bool:
    return direct.relation is Relation.A_PREFERRED and diluted.relation is Relation.B_PREFERRED


@dataclass(frozen=True)
class AllaisRegion:
    """Preference-reversal mask on a ``(x, c)`` grid plus both boundary curves.

    ``mask[i, j]`` refers to ``x_grid[i]`` and ``c_grid[j]``.
    """

    weight: float
    c_grid: tuple[float, ...]
    x_grid: tuple[float, ...]
    mask: np.ndarray = field(compare=False)
    direct: tuple[CurvePoint, ...]
    diluted: tuple[CurvePoint, ...]

    @property
    def area_fraction(self) -> float:
        return float(self.mask.mean())

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    def mask_records(self) -> list[dict]:
        return [
            {"c": c, "x": x, "in_region": int(self.mask[i, j])}
            for i, x in enumerate(self.x_grid)
            for j, c in enumerate(self.c_grid)
        ]


def allais_region(
    utility: UtilityFn,
    phi: StimulusModel = IDENTITY,
    mix_weight: float = 0.2,
    c_grid: Sequence[float] | None = None,
    x_grid: Sequence[float] | None = None,
    settings: SolverSettings | None = None,
    rule: str = "rps",
    family: Callable[[float], Lottery] = gains_family,
) -> AllaisRegion:
    """Where sure-c beats L_x but the diluted L_x beats the diluted sure-c.

    Dilution mixes both prospects with weight ``1 - mix_weight`` on a sure 0.
    """
    if not 0.0 < mix_weight <= 1.0:
        raise ValueError(f"mix_weight must lie in (0, 1], got {mix_weight!r}")
    c_grid = tuple(payoff_grid() if c_grid is None else c_grid)
    x_grid = tuple(probability_grid() if x_grid is None else x_grid)
    zero = Lottery.sure(0.0)

    mask = np.zeros((len(x_grid), len(c_grid)), dtype=bool)
    for i, x in enumerate(x_grid):
        for j, c in enumerate(c_grid):
            try:
                mask[i, j] = _is_reversal(*allais_cell(c, x, mix_weight, utility, phi, rule, family))
            except RPSError:
                mask[i, j] = False

    direct, diluted = [], []
    for x in x_grid:
        lx = family(x)
        direct.append(
            _solve_point(x, lambda lx=lx: certainty_equivalent_root(lx, utility, phi, settings, rule))
        )
        target = mix(MixtureSpec(mix_weight, lx, zero))
        span = (min(lx.min_payoff, 0.0), max(lx.max_payoff, 0.0))
        diluted.append(
            _solve_point(
                x,
                lambda target=target, span=span: solve_indifference(
                    lambda c: mix(MixtureSpec(mix_weight, Lottery.sure(c), zero)),
                    target,
                    utility,
                    phi,
                    settings,
                    rule,
                    payoff_range=span,
                ),
            )
        )
    return AllaisRegion(mix_weight, c_grid, x_grid, mask, tuple(direct), tuple(diluted))


@dataclass(frozen=True)
class IndependenceWitness:
    """A grid point where dilution by a common sure-0 reverses the preference."""

    c: float
    x: float
    mix_weight: float
    direct: PreferenceOutcome
    diluted: PreferenceOutcome

    def verify(
        self,
        utility: UtilityFn,
        phi: StimulusModel = IDENTITY,
        rule: str = "rps",
        family: Callable[[float], Lottery] = gains_family,
    ) -> bool:
        direct, diluted = allais_cell(self.c, self.x, self.mix_weight, utility, phi, rule, family)
        return _is_reversal(direct, diluted)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "x": self.x,
            "mix_weight": self.mix_weight,
            "direct": _outcome_dict(self.direct),
            "diluted": _outcome_dict(self.diluted),
        }

    @classmethod
    def from_dict(cls, d: dict) -> IndependenceWitness:
        return cls(d["c"], d["x"], d["mix_weight"], _outcome_from(d["direct"]), _outcome_from(d["diluted"]))


def independence_violation_witness(
    utility: UtilityFn,
    phi: StimulusModel = IDENTITY,
    weights: Iterable[float] = (0.2,),
    c_grid: Sequence[float] | None = None,
    x_grid: Sequence[float] | None = None,
    rule: str = "rps",
    family: Callable[[float], Lottery] = gains_family,
) -> IndependenceWitness | None:
    """Grid search for a preference reversal under common dilution.

    Among the reversing cells the one with the widest smaller margin is
    returned, so the witness is not a rounding artefact.
    """
    c_grid = payoff_grid() if c_grid is None else c_grid
    x_grid = probability_grid() if x_grid is None else x_grid
    best, best_margin = None, 0.0
    for w in weights:
        for x in x_grid:
            for c in c_grid:
                try:
                    direct, diluted = allais_cell(c, x, w, utility, phi, rule, family)
                except RPSError:
                    continue
                if not _is_reversal(direct, diluted):
                    continue
                margin = min(direct.margin, diluted.margin)
                if margin > best_margin:
                    best, best_margin = IndependenceWitness(c, x, w, direct, diluted), margin
        if best is not None:
            break
    if best is not None and not best.verify(utility, phi, rule, family):
        return None
    return best


# --------------------------------------------------------------------------
# framing and intransitivity
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FramingWitness:
    """The same pair ranked differently under ``U`` and ``U + shift``."""

    shift: float
    base: PreferenceOutcome
    shifted: PreferenceOutcome


def framing_witness(
    a: Lottery,
    b: Lottery,
    utility: UtilityFn,
    shifts: Iterable[float],
    phi: StimulusModel = IDENTITY,
) -> FramingWitness | None:
    """First shift in ``shifts`` that changes the relation between ``a`` and ``b``."""
    base = rps1_sides(ProspectPair(a, b, utility, phi))
    for s in shifts:
        try:
            shifted = rps1_sides(ProspectPair(a, b, Shifted(utility, s), phi))
        except RPSError:
            continue
        if shifted.relation is not base.relation:
            return FramingWitness(s, base, shifted)
    return None


@dataclass(frozen=True)
class IntransitivityWitness:
    """Evidence that RPS(1) preferences are not transitive.

    ``kind == "cycle"``: ``lotteries[0] > lotteries[1] > lotteries[2] > lotteries[0]``.
    ``kind == "common_ce"``: ``lotteries = (X, Y, sure c)`` with equal expected
    utility, ``c ~ X`` and ``c ~ Y`` but not ``X ~ Y``.
    """

    kind: str
    lotteries: tuple[Lottery, Lottery, Lottery]
    outcomes: tuple[PreferenceOutcome, ...]
    probe: int

    def verify(self, rule: str = "rps") -> bool:
        if self.kind == "cycle":
            return _verify_cycle(self.lotteries, rule) is not None
        if self.kind == "common_ce":
            x, y, sure = self.lotteries
            return _verify_common_ce(x, y, sure.payoffs[0], rule) is not None
        return False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "probe": self.probe,
            "lotteries": [[list(o) for o in lot.outcomes] for lot in self.lotteries],
            "outcomes": [_outcome_dict(o) for o in self.outcomes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> IntransitivityWitness:
        lots = tuple(canonicalize(tuple(o) for o in lot) for lot in d["lotteries"])
        return cls(d["kind"], lots, tuple(_outcome_from(o) for o in d["outcomes"]), d["probe"])


def _outcome_dict(o: PreferenceOutcome) -> dict:
    return {"lhs": o.lhs, "rhs": o.rhs, "relation": o.relation.value}


def _outcome_from(d: dict) -> PreferenceOutcome:
    return PreferenceOutcome(d["lhs"], d["rhs"], Relation(d["relation"]))


def _verify_cycle(lotteries, rule):
    p, q, r = lotteries
    outs = tuple(compare(a, b, rule=rule) for a, b in ((p, q), (q, r), (r, p)))
    rels = {o.relation for o in outs}
    if len(rels) == 1 and Relation.INDIFFERENT not in rels:
        return outs
    return None


def _verify_common_ce(x, y, c, rule):
    mu_x, mu_y = x.mean(), y.mean()
    if abs(mu_x - mu_y) > EU_MATCH_TOLERANCE * max(1.0, abs(mu_x)):
        return None
    sure = Lottery.sure(c)
    o_cx, o_cy, o_xy = compare(sure, x, rule=rule), compare(sure, y, rule=rule), compare(x, y, rule=rule)
    if o_cx.relation is Relation.INDIFFERENT and o_cy.relation is Relation.INDIFFERENT \
            and o_xy.relation is not Relation.INDIFFERENT:
        return o_cx, o_cy, o_xy
    return None


def _ce(lottery, rule):
    if rule == "eu":
        return eu_certainty_equivalent(lottery)
    return certainty_equivalent(lottery)


def _random_lottery(rng, size, low, high):
    payoffs = rng.uniform(low, high, size)
    probs = rng.dirichlet(np.ones(size))
    return canonicalize(zip(payoffs.tolist(), probs.tolist()))


def _matching_lottery(rng, size, low, high, mu, c, rule):
    """Random-support lottery with mean ``mu`` that is indifferent to sure ``c``.

    Both conditions are linear in the probabilities; the support is drawn at
    random and the probabilities solved for.  Returns None when the solution
    is not a valid distribution.
    """
    ys = np.sort(rng.uniform(low, high, size))
    if rule == "rps":
        if c <= 0.0:
            return None
        row, target = c / (c + mu + ys), mu / (2.0 * c + mu)
    else:
        row, target = ys, c
    system = np.vstack([np.ones(size), ys, row])
    rhs = np.array([1.0, mu, target])
    probs, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    if np.abs(system @ probs - rhs).max() > 1e-12 or (probs <= 1e-9).any():
        return None
    try:
        return canonicalize(zip(ys.tolist(), probs.tolist()))
    except RPSError:
        return None


def intransitivity_witness(
    search_budget: int,
    seed: int,
    support_sizes: Sequence[int] = (2, 3),
    payoff_range: tuple[float, float] = (0.0, 10.0),
    rule: str = "rps",
) -> IntransitivityWitness | None:
    """Randomized search for a preference cycle or a common-CE pair.

    Linear utility, identity stimulus, non-negative payoffs.  Each probe draws
    a lottery X, takes its certainty equivalent c, and solves for a lottery Y
    on a random support of ``max(support_sizes)`` points with the same mean as
    X and ``c ~ Y``.  If ``X`` and ``Y`` are strictly ordered this is a
    common-CE witness; the probe then tries to sharpen it into a strict cycle
    by nudging the worse lottery up and the sure amount between the two
    certainty equivalents.
    """
    low, high = payoff_range
    if low < 0.0:
        raise ValueError("intransitivity search needs non-negative payoffs")
    rng = np.random.default_rng(seed)
    y_size = max(support_sizes)
    scale = high - low
    for probe in range(search_budget):
        x = _random_lottery(rng, int(rng.choice(support_sizes)), low, high)
        mu = x.mean()
        c = _ce(x, rule)
        y = _matching_lottery(rng, y_size, low, high, mu, c, rule)
        if y is None:
            continue
        common = _verify_common_ce(x, y, c, rule)
        if common is None:
            continue
        better, worse = (x, y) if common[2].relation is Relation.A_PREFERRED else (y, x)
        for eta in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
            nudged = worse.shifted(eta * scale)
            try:
                c_hi = _ce(nudged, rule)
            except RPSError:
                continue
            if not c_hi > c:
                continue
            triple = (better, nudged, Lottery.sure(0.5 * (c + c_hi)))
            outs = _verify_cycle(triple, rule)
            if outs is not None:
                return IntransitivityWitness("cycle", triple, outs, probe)
        return IntransitivityWitness("common_ce", (x, y, Lottery.sure(c)), common, probe)
    return None


# --------------------------------------------------------------------------
# RPS(k) experiment
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KConvergenceRow:
    k: int | None
    freq_a: float
    relation: Relation
    conclusive: bool
    p_value: float

    @property
    def status(self) -> str:
        return str(self.relation) if self.conclusive else "InconclusiveAtConfidence"

    def record(self) -> dict:
        return {
            "k": self.k,
            "freq_a": self.freq_a,
            "relation": self.status,
            "p_value": self.p_value,
        }


def k_convergence_experiment(
    pair: ProspectPair,
    k_values: Iterable[int | None],
    sim: SimConfig,
    replications: int = 20,
    confidence: float = 0.99,
    workers: int | None = None,
) -> list[KConvergenceRow]:
    """Frequency preference for each memory length, using ``sim`` as a template.

    Every k runs ``replications`` replications of ``sim.steps`` epochs from
    the same seed.
    """
    rows = []
    for k in k_values:
        fp = frequency_preference(sim.replace(pair=pair, window_k=k), replications, confidence, workers)
        rows.append(KConvergenceRow(k, fp.freq_a, fp.relation, fp.conclusive, fp.p_value))
    return rows
