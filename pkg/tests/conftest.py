import numpy as np
import pytest

from qubitres.spectral import SpectralData
from qubitres.system import SystemParams

# acceptance lines collected by tests/test_acceptance.py and echoed at the end
ACCEPTANCE_LINES: list[str] = []


def random_density(rng, rank=4):
    X = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    r = X @ X.conj().T
    return r / np.trace(r).real


@pytest.fixture
def sys_fig():
    return SystemParams(1.0, 1.25, 1.0)


@pytest.fixture
def sd_ren(sys_fig):
    return SpectralData.renormalized(sys_fig)


@pytest.fixture
def braun():
    v = np.array([1.0, 1.0, -1.0, -1.0]) / 2.0
    return np.outer(v, v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
