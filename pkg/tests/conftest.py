import numpy as np
import pytest
from hypothesis import strategies as st

from whlab import StepLaw
from oracles import random_law

SSRW = StepLaw.from_pmf({-1: 0.5, 1: 0.5})
DRIFT_DOWN = StepLaw.from_pmf({1: 0.3, -1: 0.7})
DRIFT_UP = StepLaw.from_pmf({1: 0.7, -1: 0.3})
MIXED = StepLaw.from_pmf({-2: 0.15, -1: 0.2, 0: 0.1, 1: 0.25, 3: 0.3})


def random_laws(count, seed, **kw):
    rng = np.random.default_rng(seed)
    return [random_law(rng, **kw) for _ in range(count)]


@pytest.fixture(scope="session")
def laws200():
    """The 200 seeded random span-1 laws (m, n <= 8) reused across modules."""
    return random_laws(200, 20240601)


@st.composite
def step_laws(draw, max_reach=6, allow_one_sided=False):
    """Hypothesis strategy for tight, span-1 step laws."""
    lo = 0 if allow_one_sided else 1
    m = draw(st.integers(lo, max_reach))
    n = draw(st.integers(lo, max_reach))
    if m + n == 0:
        n = 1
    inner = [k for k in range(-m + 1, n) if draw(st.booleans())]
    pts = sorted({-m, n, *inner})
    weights = [draw(st.floats(0.05, 1.0)) for _ in pts]
    total = sum(weights)
    law = StepLaw.from_pmf({k: w / total for k, w in zip(pts, weights)})
    # span-1 and a mean safely away from zero keep the root split well conditioned
    if law.span != 1 or abs(law.mean) < 1e-6:
        law = StepLaw.from_pmf({-1: 0.4, 1: 0.6})
    return law


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
