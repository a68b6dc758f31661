import numpy as np
import pytest
from scipy import integrate

from qdiscord.measures import concurrence
from qdiscord.qstate import make_state
from qdiscord.sampling import (
    RngStream, SamplingBudgetError, make_rng, sample_at_R, sample_haar_unitary, sample_many_at_R,
    sample_mixed_state, sample_mixed_states, sample_pure_state, sample_pure_states, sample_simplex,
)


def flat_dirichlet_second_moment():
    # 6 * integral over the 3-simplex of sum_i lambda_i^2 (density 6 on lambda_1..3)
    def f(l3, l2, l1):
        l4 = 1 - l1 - l2 - l3
        return 6 * (l1**2 + l2**2 + l3**2 + l4**2)

    val, _ = integrate.tplquad(f, 0, 1, lambda l1: 0, lambda l1: 1 - l1,
                               lambda l1, l2: 0, lambda l1, l2: 1 - l1 - l2)
    return val


def test_dirichlet_oracle_value():
    assert abs(flat_dirichlet_second_moment() - 0.4) < 1e-10


def test_simplex_statistics():
    lam = sample_simplex(make_rng(1), 1_000_000)
    assert np.abs(lam.sum(axis=1) - 1).max() < 1e-14
    assert lam.min() >= 0
    assert np.abs(lam.mean(axis=0) - 0.25).max() < 0.001
    assert abs((lam**2).sum(axis=1).mean() - flat_dirichlet_second_moment()) < 0.002


def test_single_draw_shapes():
    rng = make_rng(2)
    assert sample_simplex(rng).shape == (4,)
    assert sample_haar_unitary(rng).shape == (4, 4)


def test_haar_unitarity_and_left_invariance():
    n = 100_000
    u = sample_haar_unitary(make_rng(3), n)
    err = np.abs(np.swapaxes(u.conj(), -1, -2) @ u - np.eye(4)).max()
    assert err < 1e-12
    tr = np.trace(u, axis1=1, axis2=2)
    assert abs(np.mean(np.abs(tr) ** 2) - 1) < 0.02
    v = sample_haar_unitary(make_rng(99))
    trv = np.trace(v @ u, axis1=1, axis2=2)
    for stat in (lambda t: t.real, lambda t: t.imag, lambda t: np.abs(t) ** 2):
        a, b = stat(tr), stat(trv)
        se = np.sqrt(a.var() / n + b.var() / n)
        assert abs(a.mean() - b.mean()) < 3 * se


def test_mixed_state_spectrum_matches_simplex_draw():
    rho, lam = sample_mixed_states(make_rng(4), 200, return_spectrum=True)
    w = np.linalg.eigvalsh(rho)
    assert np.abs(w - np.sort(lam, axis=1)).max() < 1e-10
    for m in rho:
        make_state(m)
    assert isinstance(sample_mixed_state(make_rng(5)).mat, np.ndarray)


def test_mixed_purity_mean():
    rho = sample_mixed_states(make_rng(6), 1_000_000)
    pur = (np.abs(rho) ** 2).sum(axis=(1, 2))
    assert abs(pur.mean() - 0.4) < 0.002


def test_pure_states_and_concurrence_law():
    rho = sample_pure_states(make_rng(7), 1_000_000)
    pur = (np.abs(rho) ** 2).sum(axis=(1, 2))
    assert np.abs(pur - 1).max() < 1e-10
    c2 = concurrence(rho) ** 2
    edges = np.linspace(0, 1, 51)
    counts, _ = np.histogram(c2, edges)
    density = counts / (counts.sum() * np.diff(edges))
    cdf = 1 - (1 - edges) ** 1.5  # integral of (3/2) sqrt(1 - t)
    expected = np.diff(cdf) / np.diff(edges)
    ok = counts >= 1000
    assert np.abs(density - expected)[ok].max() < 0.05
    assert abs(np.trace(sample_pure_state(make_rng(8)).mat @ sample_pure_state(make_rng(8)).mat) - 1) < 1e-10


def test_determinism_and_stream_independence():
    a = sample_mixed_states(RngStream(11, 0).generator(), 1000)
    b = sample_mixed_states(RngStream(11, 0).generator(), 1000)
    assert np.array_equal(a, b)
    n = 20_000
    p0 = (np.abs(sample_mixed_states(make_rng(11, 0), n)) ** 2).sum(axis=(1, 2))
    p1 = (np.abs(sample_mixed_states(make_rng(11, 1), n)) ** 2).sum(axis=(1, 2))
    assert not np.array_equal(p0, p1)
    r = np.corrcoef(p0, p1)[0, 1]
    assert abs(r) < 3 / np.sqrt(n)


def test_sample_at_R_contract():
    rng = make_rng(12)
    rho, attempts = sample_at_R(rng, 2.0)
    r = 1 / np.trace(rho.mat @ rho.mat).real
    assert 1.98 <= r <= 2.02 and attempts >= 1
    states, _ = sample_many_at_R(rng, 2.0, 200)
    rs = 1 / (np.abs(states) ** 2).sum(axis=(1, 2))
    assert np.all(np.abs(rs - 2.0) <= 0.02)
    pure, attempts = sample_at_R(rng, 1.0)
    assert abs(np.trace(pure.mat @ pure.mat).real - 1) < 1e-10 and attempts == 1


def test_sample_at_R_budget_exhaustion():
    with pytest.raises(SamplingBudgetError, match="widen the band"):
        sample_at_R(make_rng(13), 4.0, half_width=0.02, budget=100)
    with pytest.raises(ValueError):
        sample_at_R(make_rng(13), 4.5)
    with pytest.raises(ValueError):
        sample_at_R(make_rng(13), 2.0, half_width=0)


def test_sample_at_R_is_reproducible():
    a, na = sample_many_at_R(make_rng(14), 3.0, 50)
    b, nb = sample_many_at_R(make_rng(14), 3.0, 50)
    assert na == nb and np.array_equal(a, b)
