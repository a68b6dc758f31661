import time

import numpy as np
import pytest

from qdiscord.sampling import make_rng, sample_mixed_states

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return make_rng(12345)


@pytest.fixture(scope="session")
def mixed_pool():
    """A fixed pool of random mixed states for property tests."""
    return sample_mixed_states(make_rng(777, 3), 400)


def random_qubit_unitary(rng):
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_qubit_state(rng):
    v = rng.standard_normal(3)
    v *= rng.random() ** (1 / 3) / np.linalg.norm(v)
    sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    return (np.eye(2) + np.einsum("u,uab->ab", v, sig)) / 2


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mixed_records():
    """10^6 random mixed states, optimiser-free columns."""
    from qdiscord.survey import SurveyConfig, run_survey

    t0 = time.perf_counter()
    recs = run_survey(SurveyConfig(n_samples=1_000_000, seed=2024))
    recs.elapsed = time.perf_counter() - t0
    return recs


@pytest.fixture(scope="session")
def pure_records():
    from qdiscord.survey import SurveyConfig, run_survey

    t0 = time.perf_counter()
    recs = run_survey(SurveyConfig(n_samples=1_000_000, seed=2025, ensemble="pure"))
    recs.elapsed = time.perf_counter() - t0
    return recs
