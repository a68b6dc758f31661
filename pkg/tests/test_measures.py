import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdiscord import measures as M
from qdiscord.linalg import I2
from qdiscord.qstate import (
    bell_diagonal, bell_state, classical_quantum, make_state, mems, mnms, schmidt_pure, werner,
)
from qdiscord.sampling import make_rng, sample_mixed_states
from conftest import random_qubit_state, random_qubit_unitary
from oracles import (
    brute_force_chsh, brute_force_discord, brute_force_geometric_discord, fibonacci_sphere,
    scan_conditional_entropy, theta_phi_sphere,
)

PHI = bell_state()
MM = make_state(np.eye(4) / 4)
KET00 = make_state(np.diag([1.0, 0, 0, 0]))
CLASSICAL = make_state(np.diag([0.5, 0, 0, 0.5]))


def product(rng):
    a, b = random_qubit_state(rng), random_qubit_state(rng)
    return make_state(np.kron(a, b)), a


def test_entropy_examples():
    assert abs(M.vn_entropy(PHI)) < 1e-12
    assert abs(M.vn_entropy(MM) - 2) < 1e-12
    assert abs(M.vn_entropy(I2 / 2) - 1) < 1e-12


def test_qmi_examples(rng):
    prod, _ = product(rng)
    assert abs(M.qmi(prod)) < 1e-10
    assert abs(M.qmi(PHI) - 2) < 1e-12
    assert abs(M.qmi(CLASSICAL) - 1) < 1e-12


def test_conditional_entropy_examples(rng):
    prod, a = product(rng)
    for axis in ([0, 0, 1], [1, 0, 0], [0.3, -0.5, 0.8]):
        assert abs(M.conditional_entropy(prod, axis) - M.vn_entropy(a)) < 1e-10
    assert abs(M.conditional_entropy(PHI, [0, 0, 1])) < 1e-12
    assert abs(M.conditional_entropy(KET00, [1, 0, 0])) < 1e-12


def test_measurement_axis_validation():
    with pytest.raises(ValueError):
        M.MeasurementAxis((1.0, 1.0, 0.0))
    ax = M.MeasurementAxis.from_angles(math.pi / 2, 0)
    assert np.allclose(ax.n, [1, 0, 0])


def test_bloch_shortcut_matches_matrix_definition(mixed_pool):
    axes = fibonacci_sphere(50)
    for rho in mixed_pool[:20]:
        R = M.correlation_tensor(rho)
        fast = M.conditional_entropy_bloch(R[1:, 0], R[0, 1:], R[1:, 1:], axes)
        slow = scan_conditional_entropy(rho, axes)
        assert np.abs(fast - slow).max() < 1e-12
        point = M._conditional_entropy_point(R[1:, 0].tolist(), R[0, 1:].tolist(), R[1:, 1:].tolist(), axes[7])
        assert abs(point - slow[7]) < 1e-12
        assert abs(M.conditional_entropy(rho, axes[3]) - slow[3]) < 1e-12


def test_sphere_grid_counts_poles_once():
    g = M.sphere_grid(64, 128)
    assert g.shape == (62 * 128 + 2, 3)
    assert np.allclose(np.linalg.norm(g, axis=1), 1)
    assert np.sum(np.all(np.isclose(g, [0, 0, 1]), axis=1)) == 1


def test_classical_correlations_examples(rng):
    prod, _ = product(rng)
    assert abs(M.classical_correlations(prod)[0]) < 1e-9
    cc, axis = M.classical_correlations(PHI)
    assert abs(cc - 1) < 1e-9
    assert isinstance(axis, M.MeasurementAxis)


def test_werner_cc_against_dense_scan():
    axes = theta_phi_sphere(1001, 1000)
    for x in np.linspace(0, 1 / 3, 9):
        rho = werner(x)
        oracle = M.vn_entropy(M.reduce(rho, "A")) - scan_conditional_entropy(rho, axes).min()
        assert abs(M.classical_correlations(rho)[0] - oracle) < 1e-6


def test_discord_examples(rng):
    prod, _ = product(rng)
    assert M.quantum_discord(prod) < 1e-9
    assert abs(M.quantum_discord(PHI) - 1) < 1e-9


def test_schmidt_discord_is_binary_entropy():
    for theta in np.linspace(0, math.pi / 2, 13):
        expected = M.binary_entropy(math.cos(theta) ** 2)
        assert abs(M.quantum_discord(schmidt_pure(theta)) - expected) < 1e-9


def test_discord_against_brute_force_on_random_states(mixed_pool):
    axes = fibonacci_sphere(40_000)
    for rho in mixed_pool[:8]:
        delta, cc, total = M.discord_and_cc(rho)
        _, grid_cc, _ = brute_force_discord(rho, axes)
        ref_delta, ref_cc, ref_total = brute_force_discord(rho, axes, polish=True)
        assert abs(total - ref_total) < 1e-10
        # the raw oracle grid can only overestimate the minimum entropy
        assert cc >= grid_cc - 1e-12
        assert abs(cc - ref_cc) < 1e-8
        assert abs(delta - ref_delta) < 1e-8


def test_additivity(mixed_pool):
    for rho in mixed_pool[:20]:
        delta, cc, total = M.discord_and_cc(rho)
        assert abs(delta + cc - total) < 1e-6
        assert delta >= 0 and cc >= 0


def test_geometric_discord_examples():
    assert abs(M.geometric_discord(MM)) < 1e-15
    for x in np.linspace(0, 0.25, 11):
        assert abs(M.geometric_discord(werner(x)) - 0.5 * (1 - 4 * x) ** 2) < 1e-12
    for x in np.linspace(0, 0.5, 11):
        assert abs(M.geometric_discord(mnms(x)) - 0.5 * (1 - 2 * x) ** 2) < 1e-12
    for theta in np.linspace(0, math.pi / 2, 11):
        assert abs(M.geometric_discord(schmidt_pure(theta)) - 0.5 * math.sin(2 * theta) ** 2) < 1e-12


def test_geometric_discord_against_brute_force(mixed_pool):
    for rho in mixed_pool[:6]:
        assert abs(M.geometric_discord(rho) - brute_force_geometric_discord(rho)) < 1e-9


def test_geometric_discord_forms_fault():
    with pytest.raises(M.ConsistencyError):
        M.geometric_discord(np.eye(4) / 2)


def test_rank_examples(rng):
    assert M.correlation_rank(KET00) == 1 and M.zero_discord_witness(KET00)
    assert M.correlation_rank(PHI) == 4 and not M.zero_discord_witness(PHI)
    assert np.allclose(M.correlation_matrix(PHI), np.diag([1, 1, -1, 1]) / 4)
    for _ in range(20):
        cq = classical_quantum(rng.random(), random_qubit_state(rng), random_qubit_state(rng),
                               random_qubit_unitary(rng))
        assert M.correlation_rank(cq) <= 2
        assert M.zero_discord_witness(cq)
        assert M.geometric_discord(cq) < 1e-10


def test_witness_is_blind_to_measured_side():
    # Classical on B, quantum on A: rank 2, yet D (measured on A) > 0.
    plus = np.full((2, 2), 0.5)
    rho = classical_quantum(0.5, np.diag([1.0, 0]), plus, side="B")
    assert M.correlation_rank(rho) == 2
    assert M.geometric_discord(rho) > 0.01


def test_concurrence_examples():
    for theta in np.linspace(0, math.pi / 2, 11):
        assert abs(M.concurrence(schmidt_pure(theta)) - math.sin(2 * theta)) < 1e-12
    for x in np.linspace(0, 1, 11):
        assert abs(M.concurrence(mems(x)) - x) < 1e-12
    assert M.concurrence(MM) == 0


def test_concurrence_vanishes_on_ppt(mixed_pool):
    c = M.concurrence(mixed_pool)
    ppt = M.min_pt_eigenvalue(mixed_pool) >= -1e-10
    assert ppt.any() and (~ppt).any()
    assert np.all(c[ppt] < 1e-12)
    assert np.all(c[~ppt] > 0)


def test_participation_ratio_examples():
    assert abs(M.participation_ratio(PHI) - 1) < 1e-12
    assert abs(M.participation_ratio(MM) - 4) < 1e-12
    for x in np.linspace(0, 1 / 3, 7):
        assert abs(M.participation_ratio(werner(x)) - 1 / ((1 - 3 * x) ** 2 + 3 * x**2)) < 1e-12


def test_chsh_examples():
    assert abs(M.chsh_max(PHI) - 2 * math.sqrt(2)) < 1e-12
    assert abs(M.chsh_max(KET00) - 2) < 1e-12
    for x in np.linspace(0, 0.25, 11):
        assert abs(M.chsh_max(werner(x)) - 2 * math.sqrt(2) * (1 - 4 * x)) < 1e-12
    for x in np.linspace(0, 0.5, 11):
        assert abs(M.chsh_max(mnms(x)) - 2 * math.sqrt(2) * math.sqrt((1 - x) ** 2 + x**2)) < 1e-12


def test_chsh_against_setting_optimisation(mixed_pool):
    for rho in mixed_pool[:5]:
        assert abs(M.chsh_max(rho) - brute_force_chsh(rho)) < 1e-7


def test_ranges(mixed_pool):
    cols = M.measure_columns(mixed_pool)
    assert np.all((cols["D"] >= 0) & (cols["D"] <= 0.5))
    assert np.all((cols["concurrence"] >= 0) & (cols["concurrence"] <= 1))
    assert np.all((cols["chsh"] >= 0) & (cols["chsh"] <= M.TSIRELSON + 1e-10))
    assert np.all((cols["R"] >= 1) & (cols["R"] <= 4))
    assert np.all(np.isnan(cols["discord"]))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = make_rng(seed)
    rho = sample_mixed_states(rng, 1)[0]
    uv = np.kron(random_qubit_unitary(rng), random_qubit_unitary(rng))
    rot = make_state(uv @ rho @ uv.conj().T)
    a, b = M.measure_record(rho), M.measure_record(rot)
    for key in ("D", "discord", "concurrence", "R", "chsh"):
        assert abs(getattr(a, key) - getattr(b, key)) < 1e-8, key


def test_measure_record(mixed_pool):
    rec = M.measure_record(mixed_pool[0])
    assert abs(rec.discord + rec.cc - rec.qmi) < 1e-6
    assert rec.corr_rank == 4 and isinstance(rec.ppt, bool)
    no_opt = M.measure_record(mixed_pool[0], with_discord=False)
    assert no_opt.discord is None and no_opt.cc is None
