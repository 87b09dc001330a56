"""Seeded Monte Carlo of the iterated RPS(1) / RPS(k) choice process.

Stream discipline: a single run draws from ``SeedSequence(seed)``;
replication ``r`` of :func:`frequency_preference` draws from
``SeedSequence(seed, spawn_key=(r,))``.  Every epoch consumes exactly two
uniforms from its stream, the first for the choice and the second for the
payoff (inverse CDF of the chosen lottery).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from bisect import bisect_right
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import accumulate
from typing import NamedTuple

import numpy as np
from scipy.stats import binomtest

from rpsprefs.engine import ProspectPair, Relation

A, B = "A", "B"

TRAJECTORY_COLUMNS = ("epoch", "chosen", "payoff", "S_a", "S_b", "lambda_a")


class _Sampler:
    """Inverse-CDF sampler over one lottery with pre-evaluated utilities."""

    __slots__ = ("payoffs", "utilities", "cum", "last")

    def __init__(self, lottery, utility):
        self.payoffs = list(lottery.payoffs)
        self.utilities = [utility(v) for v in lottery.payoffs]
        cum = list(accumulate(lottery.probabilities))
        cum[-1] = 1.0
        self.cum = cum
        self.last = len(cum) - 1

    def index(self, u: float) -> int:
        return min(bisect_right(self.cum, u), self.last)


@dataclass(frozen=True)
class SimConfig:
    """One simulated run.  ``window_k=None`` means unbounded memory."""

    pair: ProspectPair
    window_k: int | None = 1
    steps: int = 100_000
    seed: int = 0
    burn_in: int | None = None

    def __post_init__(self):
        if self.window_k is not None and self.window_k < 1:
            raise ValueError(f"window_k must be >= 1 or None, got {self.window_k!r}")
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", self.steps // 100)
        if not self.steps > self.burn_in >= 0:
            raise ValueError(f"need steps > burn_in >= 0 (steps={self.steps}, burn_in={self.burn_in})")

    def replace(self, **changes) -> SimConfig:
        if "steps" in changes and "burn_in" not in changes:
            changes["burn_in"] = None
        return dataclasses.replace(self, **changes)

    @cached_property
    def _samplers(self) -> tuple[_Sampler, _Sampler]:
        return _Sampler(self.pair.a, self.pair.utility), _Sampler(self.pair.b, self.pair.utility)

    @cached_property
    def _priors(self) -> tuple[float, float]:
        return self.pair.priors()

    def __getstate__(self):
        # cached helpers are rebuilt lazily after unpickling
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def __setstate__(self, state):
        self.__dict__.update(state)


class StepRecord(NamedTuple):
    epoch: int
    chosen: str
    payoff: float
    s_a: float
    s_b: float
    lambda_a: float


@dataclass
class SimState:
    """Sliding window of the last ``k`` epochs and the stimuli derived from it."""

    prior_a: float
    prior_b: float
    window_k: int | None
    history: deque = field(default_factory=deque)
    n_a: int = 0
    n_b: int = 0
    sum_a: float = 0.0
    sum_b: float = 0.0
    s_a: float = 0.0
    s_b: float = 0.0
    epoch: int = 0

    @classmethod
    def initial(cls, config: SimConfig) -> SimState:
        prior_a, prior_b = config._priors
        return cls(prior_a, prior_b, config.window_k, s_a=prior_a, s_b=prior_b)

    def push(self, tag: str, payoff: float, utility: float) -> None:
        self.history.append((tag, payoff, utility))
        if tag == A:
            self.n_a += 1
            self.sum_a += utility
        else:
            self.n_b += 1
            self.sum_b += utility
        if self.window_k is not None and len(self.history) > self.window_k:
            old_tag, _, old_u = self.history.popleft()
            if old_tag == A:
                self.n_a -= 1
                self.sum_a -= old_u
            else:
                self.n_b -= 1
                self.sum_b -= old_u
        # a lottery absent from the window contributes nothing beyond its prior
        self.s_a = self.prior_a + (self.sum_a / self.n_a if self.n_a else 0.0)
        self.s_b = self.prior_b + (self.sum_b / self.n_b if self.n_b else 0.0)
        self.epoch += 1

    def recomputed_stimuli(self) -> tuple[float, float]:
        """Stimuli rebuilt from the window contents, for bookkeeping checks."""
        ua = [u for tag, _, u in self.history if tag == A]
        ub = [u for tag, _, u in self.history if tag == B]
        s_a = self.prior_a + (math.fsum(ua) / len(ua) if ua else 0.0)
        s_b = self.prior_b + (math.fsum(ub) / len(ub) if ub else 0.0)
        return s_a, s_b

    def window_means(self) -> tuple[float | None, float | None]:
        return (
            self.sum_a / self.n_a if self.n_a else None,
            self.sum_b / self.n_b if self.n_b else None,
        )


def step(state: SimState, config: SimConfig, u_choice: float, u_payoff: float) -> StepRecord:
    """Advance ``state`` by one epoch in place and describe what happened."""
    s_a, s_b = state.s_a, state.s_b
    lam = config.pair.stimulus.share(s_a, s_b)
    sampler_a, sampler_b = config._samplers
    if u_choice < lam:
        tag, sampler = A, sampler_a
    else:
        tag, sampler = B, sampler_b
    i = sampler.index(u_payoff)
    payoff = sampler.payoffs[i]
    record = StepRecord(state.epoch, tag, payoff, s_a, s_b, lam)
    state.push(tag, payoff, sampler.utilities[i])
    return record


@dataclass(frozen=True)
class SimReport:
    """Selection statistics over the post-burn-in epochs of one or more runs.

    ``transitions`` holds ``(from_a, a_to_a, from_b, b_to_b)`` counts over
    consecutive post-burn-in epochs.
    """

    freq_a: float
    freq_b: float
    epochs: int
    count_a: int
    transitions: tuple[int, int, int, int]
    window_mean_a: float | None = None
    window_mean_b: float | None = None
    window_n_a: int = 0
    window_n_b: int = 0
    trajectory: tuple[StepRecord, ...] | None = None

    @property
    def empirical_stay_a(self) -> float:
        from_a, a_to_a, _, _ = self.transitions
        return a_to_a / from_a if from_a else math.nan

    @property
    def empirical_stay_b(self) -> float:
        _, _, from_b, b_to_b = self.transitions
        return b_to_b / from_b if from_b else math.nan

    def merge(self, other: SimReport) -> SimReport:
        """Pool counts of two reports; per-run window state is dropped."""
        epochs = self.epochs + other.epochs
        count_a = self.count_a + other.count_a
        trans = tuple(x + y for x, y in zip(self.transitions, other.transitions))
        return SimReport(count_a / epochs, (epochs - count_a) / epochs, epochs, count_a, trans)


def _uniforms(seed_seq: np.random.SeedSequence, steps: int) -> list[list[float]]:
    return np.random.default_rng(seed_seq).random((steps, 2)).tolist()


def _run(config: SimConfig, seed_seq: np.random.SeedSequence, trajectory: bool) -> SimReport:
    state = SimState.initial(config)
    draws = _uniforms(seed_seq, config.steps)
    burn_in = config.burn_in
    log = [] if trajectory else None
    count_a = 0
    from_a = a_to_a = from_b = b_to_b = 0
    prev = None
    for i, (u1, u2) in enumerate(draws):
        rec = step(state, config, u1, u2)
        if log is not None:
            log.append(rec)
        if i < burn_in:
            continue
        tag = rec.chosen
        if tag == A:
            count_a += 1
        if prev == A:
            from_a += 1
            a_to_a += tag == A
        elif prev == B:
            from_b += 1
            b_to_b += tag == B
        prev = tag
    epochs = config.steps - burn_in
    mean_a, mean_b = state.window_means()
    return SimReport(
        freq_a=count_a / epochs,
        freq_b=(epochs - count_a) / epochs,
        epochs=epochs,
        count_a=count_a,
        transitions=(from_a, a_to_a, from_b, b_to_b),
        window_mean_a=mean_a,
        window_mean_b=mean_b,
        window_n_a=state.n_a,
        window_n_b=state.n_b,
        trajectory=tuple(log) if log is not None else None,
    )


def run(config: SimConfig, trajectory: bool = False) -> SimReport:
    """Simulate ``config.steps`` epochs; deterministic given ``config.seed``."""
    return _run(config, np.random.SeedSequence(config.seed), trajectory)


def replicate(config: SimConfig, index: int) -> SimReport:
    """Replication ``index`` on its own independent stream."""
    return _run(config, np.random.SeedSequence(config.seed, spawn_key=(index,)), False)


def trajectory_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for r in records:
        writer.writerow((r.epoch, r.chosen, repr(r.payoff), repr(r.s_a), repr(r.s_b), repr(r.lambda_a)))
    return buf.getvalue()


@dataclass(frozen=True)
class FrequencyPreference:
    """Majority relation across replications with an exact binomial statement.

    Each replication votes A when its ``freq_a > 0.5`` and B when below;
    exact ties abstain.  ``interval`` is the Clopper-Pearson interval for the
    probability that a replication votes A.  The result is conclusive when
    that interval excludes 0.5.
    """

    relation: Relation
    conclusive: bool
    freq_a: float
    votes_a: int
    votes_b: int
    interval: tuple[float, float]
    p_value: float
    confidence: float
    replication_freqs: tuple[float, ...]

    @property
    def status(self) -> str:
        return str(self.relation) if self.conclusive else "InconclusiveAtConfidence"


def frequency_preference(
    config: SimConfig,
    replications: int = 20,
    confidence: float = 0.99,
    workers: int | None = None,
) -> FrequencyPreference:
    """Which prospect is chosen more often, and how sure we are about it."""
    if replications < 1:
        raise ValueError("replications must be >= 1")
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(replicate, [config] * replications, range(replications)))
    else:
        reports = [replicate(config, r) for r in range(replications)]

    freqs = tuple(r.freq_a for r in reports)
    votes_a = sum(f > 0.5 for f in freqs)
    votes_b = sum(f < 0.5 for f in freqs)
    pooled = reports[0]
    for r in reports[1:]:
        pooled = pooled.merge(r)

    n = votes_a + votes_b
    if n:
        test = binomtest(votes_a, n, 0.5)
        ci = test.proportion_ci(confidence_level=confidence, method="exact")
        interval, p_value = (ci.low, ci.high), test.pvalue
    else:
        interval, p_value = (0.0, 1.0), 1.0
    if votes_a > votes_b:
        relation = Relation.A_PREFERRED
    elif votes_b > votes_a:
        relation = Relation.B_PREFERRED
    else:
        relation = Relation.INDIFFERENT
    conclusive = relation is not Relation.INDIFFERENT and (interval[0] > 0.5 or interval[1] < 0.5)
    return FrequencyPreference(
        relation, conclusive, pooled.freq_a, votes_a, votes_b, interval, p_value, confidence, freqs
    )
