import math
import pickle

import numpy as np
import pytest

from rpsprefs import Lottery, ProspectPair, Relation, markov_model
from rpsprefs.simulator import (
    TRAJECTORY_COLUMNS,
    SimConfig,
    SimReport,
    SimState,
    frequency_preference,
    replicate,
    run,
    step,
    trajectory_csv,
)

from conftest import random_lottery


def _fresh(pair, k=1):
    config = SimConfig(pair, window_k=k, steps=10, seed=0)
    return config, SimState.initial(config)


# -- single steps --------------------------------------------------------------

def test_first_epoch_uses_priors(example_pair):
    config, state = _fresh(example_pair)
    rec = step(state, config, 0.1, 0.5)
    assert rec.epoch == 0
    assert rec.s_a == rec.s_b == 100.0
    assert rec.lambda_a == 0.5
    assert rec.chosen == "A" and rec.payoff == 100.0


def test_memory_one_after_sure_payoff(example_pair):
    config, state = _fresh(example_pair)
    step(state, config, 0.1, 0.5)
    assert (state.s_a, state.s_b) == (200.0, 100.0)
    rec = step(state, config, 0.9, 0.7)
    assert rec.lambda_a == pytest.approx(2 / 3, abs=1e-15)
    # B chosen: A falls back to its prior
    assert rec.chosen == "B" and rec.payoff == 200.0
    assert (state.s_a, state.s_b) == (100.0, 300.0)


def test_payoff_draw_is_inverse_cdf(example_pair):
    config, state = _fresh(example_pair)
    assert step(state, config, 0.99, 0.49).payoff == 0.0
    assert step(state, config, 0.99, 0.5).payoff == 200.0


def test_memory_two_averages_window(example_pair):
    config, state = _fresh(example_pair, k=2)
    step(state, config, 0.99, 0.1)  # B pays 0
    step(state, config, 0.0, 0.9)  # A pays 100
    step(state, config, 0.999999, 0.9)  # B pays 200, B's 0 leaves the window
    assert state.s_b == pytest.approx(100.0 + 200.0, abs=1e-12)
    assert state.s_a == pytest.approx(100.0 + 100.0, abs=1e-12)
    step(state, config, 0.999999, 0.1)  # B pays 0; window is [200, 0] for B
    assert state.s_b == pytest.approx(100.0 + 100.0, abs=1e-12)
    assert state.s_a == 100.0


@pytest.mark.parametrize("k", [1, 3, 25, None])
def test_window_bookkeeping_matches_recomputation(k):
    rng = np.random.default_rng(4)
    pair = ProspectPair(random_lottery(rng), random_lottery(rng))
    config = SimConfig(pair, window_k=k, steps=5000, seed=1)
    state = SimState.initial(config)
    for u1, u2 in rng.random((5000, 2)):
        step(state, config, u1, u2)
        s_a, s_b = state.recomputed_stimuli()
        assert abs(state.s_a - s_a) <= 1e-9
        assert abs(state.s_b - s_b) <= 1e-9
        if k is not None:
            assert len(state.history) <= k
            assert state.n_a + state.n_b == len(state.history)


def test_config_validation(example_pair):
    with pytest.raises(ValueError):
        SimConfig(example_pair, window_k=0)
    with pytest.raises(ValueError):
        SimConfig(example_pair, steps=10, burn_in=10)
    c = SimConfig(example_pair, steps=1000)
    assert c.burn_in == 10
    assert c.replace(steps=5000).burn_in == 50


def test_config_pickles(example_pair):
    c = SimConfig(example_pair, steps=1000, seed=9)
    run(c)  # populate cached helpers
    assert pickle.loads(pickle.dumps(c)) == c


# -- runs ----------------------------------------------------------------------

def test_run_is_deterministic(example_pair):
    c = SimConfig(example_pair, steps=20_000, seed=42)
    assert run(c) == run(c)
    assert run(c, trajectory=True).trajectory == run(c, trajectory=True).trajectory
    assert run(c).count_a != run(c.replace(seed=43)).count_a


def test_replications_use_distinct_streams(example_pair):
    c = SimConfig(example_pair, steps=5000, seed=42)
    assert replicate(c, 0) != replicate(c, 1)
    assert replicate(c, 3) == replicate(c, 3)


def test_identical_prospects_split_evenly(coin_200):
    r = run(SimConfig(ProspectPair(coin_200, coin_200), steps=200_000, seed=5))
    assert abs(r.freq_a - 0.5) < 0.01


def test_report_counts(example_pair):
    r = run(SimConfig(example_pair, steps=10_000, seed=2))
    assert r.epochs == 9900
    assert r.freq_a + r.freq_b == 1.0
    from_a, a_to_a, from_b, b_to_b = r.transitions
    assert from_a + from_b == r.epochs - 1
    assert 0 <= a_to_a <= from_a and 0 <= b_to_b <= from_b


def test_transitions_match_chain(example_pair):
    r = run(SimConfig(example_pair, steps=300_000, seed=11))
    chain = markov_model(example_pair)
    assert abs(r.empirical_stay_a - chain.stay_a) < 0.01
    assert abs(r.empirical_stay_b - chain.stay_b) < 0.01
    assert abs(r.freq_a - chain.stationary_p) < 0.01


def test_unbounded_memory_tracks_running_means(sure_100, coin_210):
    # with full memory each window mean is a sample mean of i.i.d. payoffs
    pair = ProspectPair(sure_100, coin_210)
    r = run(SimConfig(pair, window_k=None, steps=200_000, seed=3))
    assert r.window_mean_a == 100.0
    sd = 105.0 / math.sqrt(r.window_n_b)
    assert abs(r.window_mean_b - 105.0) <= 3 * sd


def test_merge_pools_counts(example_pair):
    c = SimConfig(example_pair, steps=4000, seed=1)
    r0, r1 = replicate(c, 0), replicate(c, 1)
    m = r0.merge(r1)
    assert m.epochs == r0.epochs + r1.epochs
    assert m.count_a == r0.count_a + r1.count_a
    assert m.freq_a == pytest.approx((r0.count_a + r1.count_a) / m.epochs)
    assert isinstance(m, SimReport) and m.trajectory is None


def test_trajectory_csv(example_pair):
    r = run(SimConfig(example_pair, steps=50, seed=0, burn_in=0), trajectory=True)
    lines = trajectory_csv(r.trajectory).splitlines()
    assert lines[0] == ",".join(TRAJECTORY_COLUMNS)
    assert len(lines) == 51
    first = lines[1].split(",")
    assert first[0] == "0" and first[3] == "100.0" and first[5] == "0.5"


# -- frequency preference ------------------------------------------------------

def test_frequency_preference_identical_is_inconclusive(coin_200):
    fp = frequency_preference(SimConfig(ProspectPair(coin_200, coin_200), steps=2000, seed=0), 20)
    assert not fp.conclusive
    assert fp.status == "InconclusiveAtConfidence"
    assert fp.interval[0] <= 0.5 <= fp.interval[1]


def test_frequency_preference_clear_case():
    pair = ProspectPair(Lottery.sure(10), Lottery.sure(1))
    fp = frequency_preference(SimConfig(pair, steps=2000, seed=0), 20)
    assert fp.conclusive and fp.relation is Relation.A_PREFERRED
    assert fp.votes_a == 20 and fp.status == "A_preferred"
    assert fp.p_value < 0.01


def test_frequency_preference_workers_match_serial(example_pair):
    c = SimConfig(example_pair, steps=3000, seed=4)
    assert frequency_preference(c, 6, workers=2) == frequency_preference(c, 6)


def test_frequency_preference_needs_replications(example_pair):
    with pytest.raises(ValueError):
        frequency_preference(SimConfig(example_pair, steps=100), 0)
