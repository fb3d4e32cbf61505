import numpy as np
import pytest

from noisymagic import dense


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, n, rank=2):
    m = rng.normal(size=(2**n, rank)) + 1j * rng.normal(size=(2**n, rank))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_pure(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return dense.DenseState.from_vector(v / np.linalg.norm(v))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
