import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpsprefs import (
    IDENTITY,
    LINEAR,
    Lottery,
    Power,
    ProspectPair,
    Relation,
    ScaledLog,
    Shifted,
    StimulusModel,
    baseline_choice_probability,
    decision_probability,
    markov_model,
    rps1_sides,
    rps1_sides_appendix_form,
)
from rpsprefs.analysis import framing_witness
from rpsprefs.engine import parse_stimulus, rps1_residual
from rpsprefs.errors import (
    BadSpecString,
    DegenerateChain,
    DegenerateChainWarning,
    NegativeStimulus,
    ZeroDenominator,
    ZeroTotalStimulus,
)

from conftest import dominating_lottery, lotteries, random_lottery


def _oracle_sides(a, b):
    """Exact identity-phi, linear-utility sides from rational arithmetic."""
    fa = [(Fraction(v), Fraction(p)) for v, p in a.outcomes]
    fb = [(Fraction(v), Fraction(p)) for v, p in b.outcomes]
    ea = sum(v * p for v, p in fa)
    eb = sum(v * p for v, p in fb)
    lhs = sum(p * eb / (ea + eb + v) for v, p in fa)
    rhs = sum(p * ea / (ea + eb + v) for v, p in fb)
    return lhs, rhs


# -- decision probability ------------------------------------------------------

@pytest.mark.parametrize(
    "s_a, s_b, phi, expected",
    [
        (1.0, 1.0, IDENTITY, 0.5),
        (2.0, 1.0, IDENTITY, 2 / 3),
        (0.1, 0.0, StimulusModel.exponential(0.2), 0.6224593312018546),
        (0.0, 5.0, IDENTITY, 0.0),
        (-3.0, -3.0, StimulusModel.exponential(1.0), 0.5),
    ],
)
def test_decision_probability_examples(s_a, s_b, phi, expected):
    assert decision_probability(s_a, s_b, phi) == pytest.approx(expected, abs=1e-15)


def test_decision_probability_errors():
    with pytest.raises(ZeroTotalStimulus):
        decision_probability(0.0, 0.0)
    with pytest.raises(NegativeStimulus):
        decision_probability(-1.0, 2.0)


def test_exponential_share_survives_huge_gaps():
    phi = StimulusModel.exponential(0.01)
    assert decision_probability(1e4, 0.0, phi) == 1.0
    assert decision_probability(0.0, 1e4, phi) == 0.0


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0.05, 10))
def test_exponential_share_monotone_and_complementary(s_a, s_b, d):
    phi = StimulusModel.exponential(d)
    lam = decision_probability(s_a, s_b, phi)
    assert 0.0 <= lam <= 1.0
    assert lam + decision_probability(s_b, s_a, phi) == pytest.approx(1.0, abs=1e-15)
    assert decision_probability(s_a + 1.0, s_b, phi) >= lam


@pytest.mark.parametrize(
    "text, expected",
    [("identity", IDENTITY), ("exp:0.2", StimulusModel.exponential(0.2)), (" exp:3 ", StimulusModel("exponential", 3.0))],
)
def test_parse_stimulus(text, expected):
    assert parse_stimulus(text) == expected
    assert parse_stimulus(expected.spec) == expected


@pytest.mark.parametrize("text", ["", "exp", "exp:", "exp:0", "exp:-1", "exp:x", "logistic:1"])
def test_parse_stimulus_rejects(text):
    with pytest.raises(BadSpecString):
        parse_stimulus(text)


# -- RPS(1) sides --------------------------------------------------------------

def test_sure_bet_example(example_pair):
    out = rps1_sides(example_pair)
    assert out.lhs == pytest.approx(1 / 3, abs=1e-12)
    assert out.rhs == pytest.approx(3 / 8, abs=1e-12)
    assert out.relation is Relation.A_PREFERRED


def test_higher_stake_example(sure_100, coin_210):
    out = rps1_sides(ProspectPair(sure_100, coin_210))
    assert out.lhs == pytest.approx(21 / 61, abs=1e-15)
    assert out.rhs == pytest.approx(1240 / 3403, abs=1e-15)
    assert out.relation is Relation.A_PREFERRED


def test_sides_match_rational_oracle():
    rng = np.random.default_rng(3)
    for _ in range(300):
        a, b = random_lottery(rng), random_lottery(rng)
        out = rps1_sides(ProspectPair(a, b))
        lhs, rhs = _oracle_sides(a, b)
        assert abs(out.lhs - float(lhs)) <= 1e-14
        assert abs(out.rhs - float(rhs)) <= 1e-14


def test_identical_prospects_are_indifferent(coin_200):
    assert rps1_sides(ProspectPair(coin_200, coin_200)).relation is Relation.INDIFFERENT


@given(lotteries(), lotteries())
def test_swap_flips_relation(a, b):
    pair = ProspectPair(a, b)
    try:
        out = rps1_sides(pair)
    except (ZeroDenominator, NegativeStimulus):
        return
    swapped = rps1_sides(pair.swapped())
    assert swapped.lhs == out.rhs and swapped.rhs == out.lhs
    assert swapped.relation is out.relation.flipped()


@given(st.floats(0.5, 100), st.floats(0.5, 100))
def test_sure_prospects_ordered_by_amount(x, y):
    out = rps1_sides(ProspectPair(Lottery.sure(x), Lottery.sure(y)))
    if abs(x - y) > 1e-6:
        assert out.relation is (Relation.A_PREFERRED if x > y else Relation.B_PREFERRED)


def test_residual_matches_sides_in_normal_range():
    rng = np.random.default_rng(10)
    for phi in (IDENTITY, StimulusModel.exponential(2.0)):
        for _ in range(100):
            pair = ProspectPair(random_lottery(rng, high=5.0), random_lottery(rng, high=5.0), stimulus=phi)
            out = rps1_sides(pair)
            assert abs(rps1_residual(pair) - (out.lhs - out.rhs)) <= 1e-15


def test_residual_keeps_sign_when_sides_saturate():
    # both switch-away odds are 1 - O(exp(-45)), which rounds to exactly one
    b = Lottery.of((-9.033279269888116, 0.98880437721937), (-8.669729635415504, 0.0111956227806301))
    phi = StimulusModel.exponential(0.2)
    low, high = ProspectPair(Lottery.sure(-9.03), b, stimulus=phi), ProspectPair(Lottery.sure(-8.9), b, stimulus=phi)
    assert rps1_sides(low).lhs == rps1_sides(low).rhs == 1.0
    assert rps1_residual(low) > 0.0 > rps1_residual(high)


def test_appendix_form_is_complement():
    rng = np.random.default_rng(8)
    for _ in range(300):
        pair = ProspectPair(random_lottery(rng), random_lottery(rng))
        eq = rps1_sides(pair)
        stay = rps1_sides_appendix_form(pair)
        assert abs(eq.lhs + stay.lhs - 1.0) <= 1e-12
        assert abs(eq.rhs + stay.rhs - 1.0) <= 1e-12
        assert stay.relation is eq.relation


def test_appendix_form_rejects_exponential(example_pair):
    pair = ProspectPair(example_pair.a, example_pair.b, stimulus=StimulusModel.exponential(1.0))
    with pytest.raises(ValueError):
        rps1_sides_appendix_form(pair)


def test_negative_stimulus_rejected_for_identity():
    pair = ProspectPair(Lottery.of((-5, 0.5), (1, 0.5)), Lottery.sure(1))
    with pytest.raises(NegativeStimulus):
        rps1_sides(pair)
    # the exponential form takes any real stimulus
    pair = ProspectPair(pair.a, pair.b, stimulus=StimulusModel.exponential(1.0))
    assert rps1_sides(pair).relation is Relation.B_PREFERRED


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDenominator):
        rps1_sides(ProspectPair(Lottery.sure(0), Lottery.sure(0)))


def test_prior_override():
    pair = ProspectPair(Lottery.sure(1), Lottery.sure(1), prior_a=2.0, prior_b=1.0)
    out = rps1_sides(pair)
    assert out.lhs == pytest.approx(1 / 4, abs=1e-15)
    assert out.rhs == pytest.approx(2 / 4, abs=1e-15)


# -- dominance -----------------------------------------------------------------

@pytest.mark.parametrize("utility", [LINEAR, Power(0.2), ScaledLog(0.4)])
def test_dominant_prospect_preferred(utility):
    rng = np.random.default_rng(21)
    for _ in range(250):
        b = random_lottery(rng)
        a = dominating_lottery(rng, b)
        assert rps1_sides(ProspectPair(a, b, utility)).relation is Relation.A_PREFERRED
        assert rps1_sides(ProspectPair(b, a, utility)).relation is Relation.B_PREFERRED


# -- Markov chain --------------------------------------------------------------

def test_markov_example(example_pair):
    chain = markov_model(example_pair)
    assert chain.stay_a == pytest.approx(2 / 3, abs=1e-15)
    assert chain.stay_b == pytest.approx(5 / 8, abs=1e-15)
    assert chain.stationary_p == pytest.approx(9 / 17, abs=1e-15)
    assert chain.stationary_p + chain.stationary_q == 1.0
    assert chain.ergodic
    assert chain.fixed_point_residual() <= 1e-15


def test_markov_higher_stake(sure_100, coin_210):
    assert markov_model(ProspectPair(sure_100, coin_210)).stationary_p == pytest.approx(
        0.5141975350604678, abs=1e-15
    )


def test_transition_matrix_is_column_stochastic(example_pair):
    chain = markov_model(example_pair)
    t = chain.transition_matrix()
    assert np.allclose(t.sum(axis=0), 1.0, atol=1e-15)
    v = np.array([chain.stationary_p, chain.stationary_q])
    assert np.allclose(t @ v, v, atol=1e-15)


def test_relation_agrees_with_stationary_law():
    rng = np.random.default_rng(12)
    for _ in range(300):
        pair = ProspectPair(random_lottery(rng), random_lottery(rng))
        rel = rps1_sides(pair).relation
        p = markov_model(pair).stationary_p
        if rel is Relation.A_PREFERRED:
            assert p > 0.5
        elif rel is Relation.B_PREFERRED:
            assert p < 0.5


def test_absorbing_state_warns():
    pair = ProspectPair(Lottery.sure(5), Lottery.sure(0))
    with pytest.warns(DegenerateChainWarning):
        chain = markov_model(pair)
    assert not chain.ergodic
    assert chain.stationary_p == 1.0


def test_both_absorbing_raises():
    pair = ProspectPair(Lottery.sure(1), Lottery.sure(1), prior_a=0.0, prior_b=0.0)
    with pytest.raises(DegenerateChain):
        markov_model(pair)


def test_regular_chain_does_not_warn(example_pair):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        markov_model(example_pair)


# -- baseline ------------------------------------------------------------------

@pytest.mark.parametrize(
    "a, b, expected",
    [
        (Lottery.sure(100), Lottery.of((0, 0.5), (200, 0.5)), 0.5),
        (Lottery.sure(100), Lottery.of((0, 0.5), (210, 0.5)), 100 / 205),
        (Lottery.sure(3), Lottery.sure(0), 1.0),
    ],
)
def test_baseline_examples(a, b, expected):
    assert baseline_choice_probability(ProspectPair(a, b)) == pytest.approx(expected, abs=1e-15)


# -- framing -------------------------------------------------------------------

def test_uniform_utility_shift_reverses_preference(sure_100, coin_210):
    w = framing_witness(sure_100, coin_210, LINEAR, range(0, 1001, 10))
    assert w is not None
    assert w.base.relation is Relation.A_PREFERRED
    assert w.shifted.relation is Relation.B_PREFERRED
    assert w.shift == 90
    # the reversal persists at a round shift of one sure payoff
    at_100 = rps1_sides(ProspectPair(sure_100, coin_210, Shifted(LINEAR, 100)))
    assert at_100.relation is Relation.B_PREFERRED


def test_shift_never_changes_expected_utility_order(sure_100, coin_210):
    from rpsprefs.analysis import eu_sides

    for s in (0, 90, 100, 1000):
        pair = ProspectPair(sure_100, coin_210, Shifted(LINEAR, s))
        assert eu_sides(pair).relation is Relation.B_PREFERRED


@settings(max_examples=50)
@given(st.floats(0, 1e3))
def test_large_shift_restores_eu_order(extra):
    # as the common offset grows, RPS(1) follows the expected utility ranking
    a, b = Lottery.sure(100), Lottery.of((0, 0.5), (210, 0.5))
    out = rps1_sides(ProspectPair(a, b, Shifted(LINEAR, 1e3 + extra)))
    assert out.relation is Relation.B_PREFERRED
    assert math.isfinite(out.margin)
