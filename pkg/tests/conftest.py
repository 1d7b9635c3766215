import numpy as np
import pytest

from twinbeam.interferometer import MzConfig
from twinbeam.nopo import NopoParams


@pytest.fixture
def paper():
    return NopoParams()


@pytest.fixture
def tuned():
    """Phase-mode interferometer with theta = pi exactly at 2 MHz."""
    return MzConfig.tuned(2e6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def williamson_invariants(v):
    """Symplectic eigenvalues of a two-mode covariance from its invariants."""
    v = np.asarray(v, dtype=float)
    a, b, c = v[:2, :2], v[2:, 2:], v[:2, 2:]
    delta = np.linalg.det(a) + np.linalg.det(b) + 2.0 * np.linalg.det(c)
    det = np.linalg.det(v)
    disc = np.sqrt(max(delta ** 2 - 4.0 * det, 0.0))
    return np.sqrt((delta - disc) / 2.0), np.sqrt((delta + disc) / 2.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
