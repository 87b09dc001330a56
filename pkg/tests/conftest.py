import math

import numpy as np
import pytest
from hypothesis import strategies as st

from rpsprefs import Lottery, ProspectPair, canonicalize


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


_CRITERIA = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        _CRITERIA.append((marker.args[0], marker.args[1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, duration in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] AC{number:02d} {title} ({duration:.2f}s)")


# -- shared objects ------------------------------------------------------------

@pytest.fixture
def sure_100():
    return Lottery.sure(100)


@pytest.fixture
def coin_200():
    return Lottery.of((0, 0.5), (200, 0.5))


@pytest.fixture
def coin_210():
    return Lottery.of((0, 0.5), (210, 0.5))


@pytest.fixture
def example_pair(sure_100, coin_200):
    """Sure 100 against a 50/50 gamble on 0 or 200, linear utility."""
    return ProspectPair(sure_100, coin_200)


# -- generators ----------------------------------------------------------------

def random_lottery(rng, sizes=(2, 3), low=0.0, high=100.0):
    n = int(rng.choice(sizes))
    payoffs = rng.uniform(low, high, n)
    probs = rng.dirichlet(np.ones(n))
    return canonicalize(zip(payoffs.tolist(), probs.tolist()))


def dominating_lottery(rng, base, high=100.0):
    """Push every payoff of ``base`` up by a random amount (at least one strictly)."""
    n = len(base)
    bumps = rng.uniform(0.0, 20.0, n)
    bumps[rng.random(n) < 0.4] = 0.0
    bumps[rng.integers(n)] = rng.uniform(1.0, 20.0)
    return canonicalize((v + d, p) for (v, p), d in zip(base.outcomes, bumps))


@st.composite
def lotteries(draw, min_size=1, max_size=3, low=0.0, high=100.0):
    n = draw(st.integers(min_size, max_size))
    payoffs = draw(
        st.lists(
            st.floats(low, high, allow_nan=False, allow_infinity=False),
            min_size=n, max_size=n,
        )
    )
    weights = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    total = sum(weights)
    return canonicalize((v, w / total) for v, w in zip(payoffs, weights))


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)
