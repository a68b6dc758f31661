"""Correlation quantifiers for two-qubit states.

Entropies are in bits. Unless noted, functions take a
:class:`~qdiscord.qstate.DensityMatrix`, a 4x4 array, or a stack of 4x4
arrays and return a float or an array over the stack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .linalg import YY, hermitian_eigvals, sym3_spectrum
from .qstate import as_matrix, correlation_tensor, min_pt_eigenvalue, reduce, PPT_TOL

LN2 = math.log(2)
EIG_FLOOR = 1e-14
PROB_FLOOR = 1e-14
FORM_AGREEMENT_TOL = 1e-10
D_CLAMP = 1e-12
DISCORD_CLAMP = 1e-9
TSIRELSON = 2 * math.sqrt(2)

DEFAULT_GRID = (64, 128)
DEFAULT_REFINE_TOL = 1e-6


class ConsistencyError(ArithmeticError):
    """Two routes to the same quantity disagreed beyond tolerance."""


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def entropy_from_eigs(w):
    w = np.asarray(w, dtype=float)
    w = np.where(w < EIG_FLOOR, 0.0, w)
    return entr(w).sum(axis=-1) / LN2


def binary_entropy(p):
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    return (entr(p) + entr(1 - p)) / LN2


def qubit_entropy_from_radius(r):
    """Entropy of a qubit state whose Bloch vector has length ``r``."""
    r = np.clip(r, 0.0, 1.0)
    return binary_entropy((1 + r) / 2)


def vn_entropy(sigma):
    """Von Neumann entropy in bits of a 2x2 or 4x4 density matrix."""
    return _scalar(entropy_from_eigs(hermitian_eigvals(as_matrix(sigma))))


def qmi(rho):
    """Quantum mutual information S(A) + S(B) - S(AB)."""
    m = as_matrix(rho)
    return _scalar(vn_entropy(reduce(m, "A")) + vn_entropy(reduce(m, "B")) - vn_entropy(m))


# --- measured conditional entropy ----------------------------------------

@dataclass(frozen=True)
class MeasurementAxis:
    """Bloch direction ``n`` of the projective measurement on B."""

    n: tuple

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        norm = np.linalg.norm(n)
        if n.shape != (3,) or abs(norm - 1) > 1e-12:
            raise ValueError(f"measurement axis must be a unit 3-vector, got {self.n}")
        object.__setattr__(self, "n", tuple(float(v) for v in n))

    @classmethod
    def from_angles(cls, theta, phi):
        return cls(_angles_to_axes(theta, phi))

    @classmethod
    def normalized(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v / np.linalg.norm(v))

    def projectors(self):
        from .linalg import PAULI_STACK, I2

        ns = np.einsum("u,uab->ab", np.asarray(self.n), PAULI_STACK)
        return (I2 + ns) / 2, (I2 - ns) / 2


def _angles_to_axes(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def conditional_entropy(rho, axis):
    """S(A | {Pi_j^B}) for the von Neumann measurement along ``axis``.

    Computed from the matrix definition: post-measurement states of A are
    formed explicitly and their entropies weighted by outcome probability.
    """
    if not isinstance(axis, MeasurementAxis):
        axis = MeasurementAxis.normalized(axis)
    m = as_matrix(rho)
    total = 0.0
    for proj in axis.projectors():
        big = np.kron(np.eye(2), proj)
        p = float(np.trace(big @ m).real)
        if p < PROB_FLOOR:
            continue
        post = reduce(big @ m @ big, "A") / p
        total += p * vn_entropy(post)
    return total


def conditional_entropy_bloch(x, y, T, axes):
    """Vectorised S(A | n) over a stack of axes, from the Bloch data.

    Outcome +-  has probability (1 +- y.n)/2 and leaves A with Bloch vector
    (x +- T n) / (1 +- y.n).
    """
    axes = np.asarray(axes, dtype=float)
    yn = axes @ y
    tn = axes @ T.T
    total = np.zeros(axes.shape[:-1])
    for sign in (1.0, -1.0):
        w = 1 + sign * yn
        v = np.linalg.norm(x + sign * tn, axis=-1)
        ok = w > 2 * PROB_FLOOR
        r = np.where(ok, v / np.where(ok, w, 1.0), 0.0)
        total += np.where(ok, 0.5 * w * qubit_entropy_from_radius(r), 0.0)
    return total


def _h_radius(r):
    if r >= 1.0:
        return 0.0
    p = 0.5 * (1 + r)
    q = 0.5 * (1 - r)
    return -(p * math.log(p) + (q * math.log(q) if q > 0 else 0.0)) / LN2


def _conditional_entropy_point(x, y, T, n):
    """Scalar twin of :func:`conditional_entropy_bloch` on plain floats."""
    n0, n1, n2 = n
    yn = y[0] * n0 + y[1] * n1 + y[2] * n2
    tn = [T[u][0] * n0 + T[u][1] * n1 + T[u][2] * n2 for u in range(3)]
    total = 0.0
    for sign in (1.0, -1.0):
        w = 1 + sign * yn
        if w <= 2 * PROB_FLOOR:
            continue
        v = math.sqrt(sum((x[u] + sign * tn[u]) ** 2 for u in range(3)))
        total += 0.5 * w * _h_radius(v / w)
    return total


def sphere_grid(n_theta, n_phi):
    """Polar/azimuthal grid with each pole included once."""
    theta = np.linspace(0, math.pi, n_theta)[1:-1]
    phi = np.linspace(0, 2 * math.pi, n_phi, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    body = _angles_to_axes(tt.ravel(), pp.ravel())
    poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
    return np.vstack([poles, body])


_GRID_CACHE = {}


def _cached_grid(grid):
    key = tuple(grid)
    if key not in _GRID_CACHE:
        _GRID_CACHE[key] = sphere_grid(*key)
    return _GRID_CACHE[key]


def _tangent_frame(n):
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, a)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(n, e1)


def _pick_starts(axes, values, k, min_angle):
    order = np.argsort(values)
    chosen = []
    cos_min = math.cos(min_angle)
    for i in order:
        n = axes[i]
        # n and -n describe the same measurement
        if all(abs(n @ c) < cos_min for c in chosen):
            chosen.append(n)
            if len(chosen) == k:
                break
    return chosen


def min_conditional_entropy(rho, grid=DEFAULT_GRID, refine_tol=DEFAULT_REFINE_TOL, n_starts=3):
    """Minimise S(A | n) over the Bloch sphere of B.

    A coarse ``grid = (n_theta, n_phi)`` scan picks up to ``n_starts``
    well-separated candidates, each refined by Nelder-Mead in a local
    tangent chart. Returns ``(value, axis)``.
    """
    R = correlation_tensor(rho)
    x, y, T = R[1:, 0], R[0, 1:], R[1:, 1:]
    xs, ys, Ts = x.tolist(), y.tolist(), T.tolist()
    axes = _cached_grid(grid)
    vals = conditional_entropy_bloch(x, y, T, axes)
    step = math.pi / max(grid[0] - 1, 1)
    best_val, best_axis = float(vals.min()), axes[int(vals.argmin())]
    for n0 in _pick_starts(axes, vals, n_starts, 3 * step):
        e1, e2 = _tangent_frame(n0)

        def f(ab, n0=n0.tolist(), e1=e1.tolist(), e2=e2.tolist()):
            a, b = ab
            v = [n0[k] + a * e1[k] + b * e2[k] for k in range(3)]
            norm = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
            return _conditional_entropy_point(xs, ys, Ts, [c / norm for c in v])

        res = minimize(
            f,
            np.zeros(2),
            method="Nelder-Mead",
            options={
                "xatol": refine_tol / 10,
                "fatol": 1e-15,
                "initial_simplex": np.array([[0, 0], [step, 0], [0, step]]),
                "maxiter": 2000,
            },
        )
        if res.fun < best_val:
            v = n0 + res.x[0] * e1 + res.x[1] * e2
            best_val, best_axis = float(res.fun), v / np.linalg.norm(v)
    return best_val, MeasurementAxis.normalized(best_axis)


def classical_correlations(rho, grid=DEFAULT_GRID, refine_tol=DEFAULT_REFINE_TOL):
    """Largest S(A) - S(A | Pi^B) over projective measurements on B.

    Returns ``(cc, axis)`` with the maximising axis.
    """
    s_a = vn_entropy(reduce(as_matrix(rho), "A"))
    s_cond, axis = min_conditional_entropy(rho, grid, refine_tol)
    return max(s_a - s_cond, 0.0), axis


def discord_and_cc(rho, grid=DEFAULT_GRID, refine_tol=DEFAULT_REFINE_TOL):
    """``(discord, cc, qmi)`` sharing one optimisation."""
    total = qmi(rho)
    cc, _ = classical_correlations(rho, grid, refine_tol)
    delta = total - cc
    if -DISCORD_CLAMP <= delta < 0:
        delta = 0.0
    return delta, cc, total


def quantum_discord(rho, grid=DEFAULT_GRID, refine_tol=DEFAULT_REFINE_TOL):
    return discord_and_cc(rho, grid, refine_tol)[0]


# --- closed-form quantities ----------------------------------------------

def purity(rho):
    m = as_matrix(rho)
    return _scalar((np.abs(m) ** 2).sum(axis=(-1, -2)))


def participation_ratio(rho):
    """R = 1 / Tr(rho^2), between 1 (pure) and 4 (maximally mixed)."""
    return _scalar(1.0 / np.asarray(purity(rho)))


def geometric_discord_forms(rho):
    """Both algebraic forms of the closed-form geometric discord.

    ``(||x||^2 + ||T||^2 - lmax) / 4`` and
    ``1/R - 1/4 - (||y||^2 + lmax) / 4``, with ``lmax`` the largest
    eigenvalue of ``x x^t + T T^t``.
    """
    R = correlation_tensor(rho)
    x, y, T = R[..., 1:, 0], R[..., 0, 1:], R[..., 1:, 1:]
    xx = (x * x).sum(axis=-1)
    M = x[..., :, None] * x[..., None, :] + T @ np.swapaxes(T, -1, -2)
    lmax = sym3_spectrum(M)[..., 0]
    first = (xx + (T * T).sum(axis=(-1, -2)) - lmax) / 4
    second = purity(rho) - 0.25 - ((y * y).sum(axis=-1) + lmax) / 4
    return first, second


def geometric_discord(rho):
    """Geometric (Hilbert-Schmidt) discord, in [0, 1/2]."""
    first, second = geometric_discord_forms(rho)
    gap = np.max(np.abs(first - second))
    if gap > FORM_AGREEMENT_TOL:
        raise ConsistencyError(f"geometric discord forms disagree by {gap:.3g}")
    d = np.where((first < 0) & (first >= -D_CLAMP), 0.0, first)
    return _scalar(d)


def correlation_matrix(rho):
    """The 4x4 matrix (1/4)[[1, y^t], [x, T]]."""
    return correlation_tensor(rho) / 4


def correlation_rank(rho, tol=1e-8):
    s = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    rank = (s > tol).sum(axis=-1)
    return int(rank) if rank.ndim == 0 else rank


def zero_discord_witness(rho, tol=1e-8):
    """True when the correlation matrix has rank <= 2."""
    res = np.asarray(correlation_rank(rho, tol)) <= 2
    return bool(res) if res.ndim == 0 else res


def concurrence(rho):
    """Wootters concurrence."""
    m = as_matrix(rho)
    w, v = np.linalg.eigh(m)
    sq = (v * np.sqrt(np.clip(w, 0, None))[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)
    mu = np.linalg.svd(sq @ YY @ sq.conj(), compute_uv=False)
    c = mu[..., 0] - mu[..., 1] - mu[..., 2] - mu[..., 3]
    return _scalar(np.clip(c, 0.0, 1.0))


def chsh_max(rho):
    """Largest CHSH value 2 sqrt(t1 + t2) over measurement settings.

    ``t1 >= t2`` are the two largest eigenvalues of ``T^t T``.
    """
    T = correlation_tensor(rho)[..., 1:, 1:]
    tau = sym3_spectrum(np.swapaxes(T, -1, -2) @ T)
    return _scalar(2 * np.sqrt(np.clip(tau[..., 0] + tau[..., 1], 0, None)))


# --- records --------------------------------------------------------------

@dataclass(frozen=True)
class MeasureRecord:
    D: float
    discord: Optional[float]
    cc: Optional[float]
    qmi: float
    concurrence: float
    R: float
    chsh: float
    ppt: bool
    corr_rank: int

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def measure_columns(states, with_discord=False, grid=DEFAULT_GRID, refine_tol=DEFAULT_REFINE_TOL):
    """Evaluate every quantifier on a stack of states.

    Returns a dict of 1-D arrays keyed like :class:`MeasureRecord`.
    Without ``with_discord`` the ``discord``/``cc`` columns are NaN.
    """
    m = np.asarray(as_matrix(states))
    if m.ndim == 2:
        m = m[None]
    n = m.shape[0]
    cols = {
        "D": np.atleast_1d(geometric_discord(m)),
        "qmi": np.atleast_1d(qmi(m)),
        "concurrence": np.atleast_1d(concurrence(m)),
        "R": np.atleast_1d(participation_ratio(m)),
        "chsh": np.atleast_1d(chsh_max(m)),
        "ppt": np.atleast_1d(min_pt_eigenvalue(m) >= -PPT_TOL),
        "corr_rank": np.atleast_1d(correlation_rank(m)).astype(np.int64),
    }
    discord = np.full(n, np.nan)
    cc = np.full(n, np.nan)
    if with_discord:
        for i in range(n):
            discord[i], cc[i], _ = discord_and_cc(m[i], grid, refine_tol)
    cols["discord"] = discord
    cols["cc"] = cc
    return cols


def measure_record(rho, with_discord=True, grid=DEFAULT_GRID, refine_tol=DEFAULT_REFINE_TOL):
    cols = measure_columns(as_matrix(rho), with_discord, grid, refine_tol)
    return record_from_columns(cols, 0)


def record_from_columns(cols, i):
    def opt(v):
        return None if np.isnan(v) else float(v)

    return MeasureRecord(
        D=float(cols["D"][i]),
        discord=opt(cols["discord"][i]),
        cc=opt(cols["cc"][i]),
        qmi=float(cols["qmi"][i]),
        concurrence=float(cols["concurrence"][i]),
        R=float(cols["R"][i]),
        chsh=float(cols["chsh"][i]),
        ppt=bool(cols["ppt"][i]),
        corr_rank=int(cols["corr_rank"][i]),
    )
