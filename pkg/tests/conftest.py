import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from xdiscord.xcore import CanonicalXState, bloch_params  # noqa: E402

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20101)


frac = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def canonical_states(draw):
    """Valid canonical X-states built from matrix elements (always positive)."""
    w = np.array([draw(st.floats(min_value=0.0, max_value=1.0)) for _ in range(4)])
    if w.sum() < 1e-6:
        w = np.ones(4)
    r00, r11, r22, r33 = w / w.sum()
    r03 = draw(frac) * np.sqrt(r00 * r33)
    r12 = draw(frac) * np.sqrt(r11 * r22)
    return CanonicalXState(*(float(v) for v in (r00, r11, r22, r33, r03, r12)))


@st.composite
def params(draw):
    return bloch_params(draw(canonical_states()))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
