import numpy as np
import pytest

from parabolic3b.core import MassTriple


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_masses(rng, n, concentration=4.0):
    """Mass triples normalized to total mass 1 (keeps the flow rates moderate)."""
    return [MassTriple(*rng.dirichlet([concentration] * 3)) for _ in range(n)]


@pytest.fixture
def equal():
    return MassTriple(1.0, 1.0, 1.0)


# acceptance results, echoed in the terminal summary so they survive output capture
_ACCEPTANCE = {}


@pytest.fixture
def verdict():
    def record(number, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
