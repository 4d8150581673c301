import functools
import math

import numpy as np
import pytest

from relspin.constants import length_to_au

WAVELENGTH = length_to_au(0.159e-9)

# criterion number -> (passed, message), filled by test_acceptance.py
ACCEPTANCE_LINES = {}


def record_acceptance(number: int, passed: bool, message: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {message}"
    ACCEPTANCE_LINES[number] = (passed, line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number][1])


@functools.lru_cache(maxsize=1)
def hydrogen_field(Z: float, m: float = 0.5, points: int = 128):
    from relspin.grid import hydrogenic_grid, sample_state
    from relspin.hydrogenic import ground_state

    return sample_state(ground_state(Z, m), hydrogenic_grid(Z, points))


@functools.lru_cache(maxsize=None)
def grid_spin(Z: float, kind: str, points: int = 128) -> float:
    from relspin.spin_operators import spin_expectation

    return float(spin_expectation(hydrogen_field(Z, 0.5, points), kind).real)


@functools.lru_cache(maxsize=None)
def grid_variance(Z: float, kind: str, points: int = 128) -> float:
    from relspin.grid import variance_of_position

    return variance_of_position(hydrogen_field(Z, 0.5, points), kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def wavelength():
    return WAVELENGTH


def isclose_rel(a, b, rel):
    return math.isclose(a, b, rel_tol=rel)
