import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from photon_scatter import CavityParams

sys.path.insert(0, str(Path(__file__).parent))

GOLDEN = Path(__file__).parent / "golden"

# Reference cavity: k = omega_1 resonance, g = 0.02, kappa_3i = 2, kappa_3e = 0.1.
BLOCKADE_RATIO = 1 / 1.04  # kappa_1e / kappa_1i


def blockade_cavity(ratio=BLOCKADE_RATIO, g=0.02):
    return CavityParams.degenerate_cavity(1.0, 2.0, ratio, 1.0, 0.1, 2.0, g)


def two_mode_cavity(g=0.02):
    return CavityParams((1.0, 1.5, 2.5), (1.04, 1 / 1.04, 0.1), (1.0, 1.0, 2.0), g)


@pytest.fixture
def deg():
    return blockade_cavity()


@pytest.fixture
def nondeg():
    return two_mode_cavity()


rates = st.floats(0.05, 3.0)
freqs = st.floats(-3.0, 3.0)


@st.composite
def cavities(draw, degenerate=None, max_g=0.5):
    if degenerate is None:
        degenerate = draw(st.booleans())
    g = draw(st.one_of(st.just(0.0), st.floats(1e-6, max_g)))
    if degenerate:
        w1 = draw(freqs)
        return CavityParams.degenerate_cavity(w1, 2 * w1 + draw(st.floats(-1, 1)),
                                              draw(rates), draw(rates), draw(rates), draw(rates), g)
    w1, w2 = draw(freqs), draw(freqs)
    return CavityParams(
        (w1, w2, w1 + w2 + draw(st.floats(-1, 1))),
        tuple(draw(rates) for _ in range(3)),
        tuple(draw(rates) for _ in range(3)),
        g,
    )


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), 1e-300))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is None or not acceptance._lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(acceptance._lines):
        terminalreporter.write_line(line)
