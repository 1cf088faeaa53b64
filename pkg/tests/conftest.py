import math

import numpy as np
import pytest
from hypothesis import strategies as st

from coulomb_pair.field import ChargeConfig

# witness configurations, d = 3
A1 = ChargeConfig(3, 1.0, 3.0, 2.0, 1.0)
A2 = ChargeConfig(3, 1.0, 9.0, 2.0, 1.0)
B = ChargeConfig(3, 1.0, 3.0, 1.0, 2.0)
C = ChargeConfig(3, 1.0, 9.0, 1.0, 2.0)
WEAK_B = ChargeConfig(3, 8.0, 9.0, 1.0, 2.0)
SINGLE = ChargeConfig(3, 0.0, 2.0, 1.0, 1.0)


def bisect(f, lo, hi, iters=200):
    """Plain bisection, used as an oracle independent of the library root finders."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < 1e-15 * max(1.0, abs(mid)):
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@st.composite
def admissible_configs(draw, dims=(2, 3), excess=(1.05, 8.0)):
    d = draw(st.sampled_from(dims))
    g1 = draw(st.floats(0.0, 10.0))
    g2 = g1 + draw(st.floats(*excess))
    h1 = draw(st.floats(0.2, 5.0))
    h2 = draw(st.floats(0.2, 5.0))
    return ChargeConfig(d, g1, g2, h1, h2)


def random_admissible(rng, n, dims=(2, 3)):
    out = []
    for _ in range(n):
        d = int(rng.choice(dims))
        g1 = float(rng.uniform(0.0, 10.0))
        g2 = g1 + float(rng.uniform(1.05, 8.0))
        h1, h2 = rng.uniform(0.2, 5.0, 2)
        out.append(ChargeConfig(d, g1, g2, float(h1), float(h2)))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
