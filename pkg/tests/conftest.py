import numpy as np
import pytest
from hypothesis import strategies as st

from adjrisk.distributions import DiscreteDistribution


def random_law(rng, max_atoms=6, scale=1.0):
    k = int(rng.integers(1, max_atoms + 1))
    vals = rng.normal(0.0, scale, size=k)
    probs = rng.dirichlet(np.ones(k))
    return DiscreteDistribution.from_atoms(zip(vals.tolist(), probs.tolist()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240208)


@st.composite
def laws(draw, max_atoms=6, lo=-10.0, hi=10.0):
    k = draw(st.integers(1, max_atoms))
    vals = draw(st.lists(st.floats(lo, hi, allow_nan=False), min_size=k, max_size=k, unique=True))
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    total = sum(weights)
    return DiscreteDistribution.from_atoms((v, w / total) for v, w in zip(vals, weights))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
