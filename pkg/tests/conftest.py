import math

from scipy import integrate


def quad_k(m):
    """Independent oracle: K(m) straight from its defining integral."""
    return integrate.quad(lambda t: 1.0 / math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, math.pi / 2,
                          epsabs=1e-13, epsrel=1e-13, limit=200)[0]


def quad_e(m):
    return integrate.quad(lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, math.pi / 2,
                          epsabs=1e-13, epsrel=1e-13, limit=200)[0]


# -- acceptance report -----------------------------------------------------

import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """``criterion(number, ok, detail)`` records one acceptance line and returns ``ok``."""
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
