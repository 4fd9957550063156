import cmath
import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20070501)


def omega(d, k):
    """Reference root of unity, evaluated straight from the formula."""
    return cmath.exp(2j * math.pi * k / d)


def random_amplitudes(d, count, rng):
    amps = rng.standard_normal(d**count) + 1j * rng.standard_normal(d**count)
    return amps / np.linalg.norm(amps)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
