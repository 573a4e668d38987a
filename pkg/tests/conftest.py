import math

import numpy as np
import pytest
from hypothesis import strategies as st

from quantum_bos import GamePayoffs, InitialState, make_initial_state

BASE = GamePayoffs(2, 1, 0)
STATE_11 = InitialState.from_moduli2([5 / 16, 5 / 16, 1 / 16, 5 / 16])
STATE_00 = InitialState.from_moduli2([5 / 16, 1 / 16, 5 / 16, 5 / 16])
BELL = make_initial_state(1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2))
PRODUCT = make_initial_state(1, 0, 0, 0)

# acceptance lines collected here and echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_state(rng) -> InitialState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return make_initial_state(*(v / np.linalg.norm(v)))


def random_payoffs(rng, low=-10.0, high=10.0) -> GamePayoffs:
    while True:
        gamma, beta, alpha = np.sort(rng.uniform(low, high, size=3))
        if alpha - beta > 1e-3 and beta - gamma > 1e-3:
            return GamePayoffs(alpha, beta, gamma)


_component = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@st.composite
def states(draw):
    re = [draw(_component) for _ in range(4)]
    im = [draw(_component) for _ in range(4)]
    v = np.array(re) + 1j * np.array(im)
    norm = np.linalg.norm(v)
    if norm < 1e-3:
        v = np.array([1, 0, 0, 0], dtype=complex)
        norm = 1.0
    return make_initial_state(*(v / norm))


@st.composite
def canonical_payoffs(draw):
    gamma = draw(st.floats(min_value=-50, max_value=50))
    gap1 = draw(st.floats(min_value=1e-3, max_value=50))
    gap2 = draw(st.floats(min_value=1e-3, max_value=50))
    return GamePayoffs(gamma + gap1 + gap2, gamma + gap1, gamma)


probabilities = st.floats(min_value=0.0, max_value=1.0)
