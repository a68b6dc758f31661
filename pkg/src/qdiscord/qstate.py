"""Two-qubit density matrices, their Bloch form, and named state families.

Basis order is |00>, |01>, |10>, |11> with subsystem A as the left tensor
factor. Bell-basis matrices use the order (Phi+, Phi-, Psi+, Psi-) with
Phi+- = (|00> +- |11>)/sqrt2 and Psi+- = (|01> +- |10>)/sqrt2.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import I2, PAULIS, dagger, hermiticity_deviation, kron2

STATE_TOL = 1e-10
PPT_TOL = 1e-10

# sigma_0..sigma_3 with sigma_0 = identity.
SIGMA4 = np.stack((I2,) + PAULIS)

_s = 1 / math.sqrt(2)
# Columns are the Bell vectors in computational coordinates.
BELL_BASIS = np.array(
    [
        [_s, _s, 0, 0],
        [0, 0, _s, _s],
        [0, 0, _s, -_s],
        [_s, -_s, 0, 0],
    ],
    dtype=complex,
)
BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")


class InvalidStateError(ValueError):
    """A matrix failed one of the density-matrix invariants.

    ``invariant`` names the check (``hermiticity``, ``trace``, ``positivity``,
    ``shape`` or ``domain``) and ``magnitude`` is the size of the violation.
    """

    def __init__(self, invariant, magnitude, message=None):
        self.invariant = invariant
        self.magnitude = magnitude
        if message is None:
            message = f"{invariant} deviation {magnitude:.3g}"
        super().__init__(message)


class StateFileError(ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 density matrix. Build through :func:`make_state`."""

    mat: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(\n{np.array2string(self.mat, precision=6)})"


@dataclass(frozen=True)
class BlochForm:
    x: np.ndarray
    y: np.ndarray
    T: np.ndarray


@dataclass(frozen=True)
class BellDiagonalSpec:
    """Weights on (Phi+, Phi-, Psi+, Psi-)."""

    p: tuple

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (4,):
            raise InvalidStateError("shape", p.size, "Bell-diagonal spec needs 4 weights")
        if p.min() < -STATE_TOL or abs(p.sum() - 1) > STATE_TOL:
            raise InvalidStateError(
                "domain", abs(p.sum() - 1), f"Bell weights must be a probability vector, got {p}"
            )
        object.__setattr__(self, "p", tuple(float(v) for v in p))


def as_matrix(rho):
    """Return the complex array behind a DensityMatrix or array-like."""
    if isinstance(rho, DensityMatrix):
        return rho.mat
    return np.asarray(rho, dtype=complex)


def make_state(entries, tol=STATE_TOL):
    """Validate ``entries`` (16 values or a 4x4 array) as a density matrix.

    Slightly negative eigenvalues (down to ``-tol``) are clipped to zero and
    the trace renormalised.
    """
    m = np.array(entries, dtype=complex)
    if m.size != 16:
        raise InvalidStateError("shape", m.size, f"expected 16 entries, got {m.size}")
    m = m.reshape(4, 4)
    herm = float(hermiticity_deviation(m))
    if herm > tol:
        raise InvalidStateError("hermiticity", herm)
    m = 0.5 * (m + m.conj().T)
    tr = float(np.trace(m).real)
    if abs(tr - 1) > tol:
        raise InvalidStateError("trace", abs(tr - 1))
    w, v = np.linalg.eigh(m)
    if w[0] < -tol:
        raise InvalidStateError("positivity", -w[0], f"positivity deviation {-w[0]:.3g} (min eigenvalue {w[0]:.3g})")
    if w[0] < 0 or w[-1] > 1:
        w = np.clip(w, 0.0, 1.0)
        w /= w.sum()
        m = (v * w) @ v.conj().T
    return DensityMatrix(m)


def correlation_tensor(rho):
    """Real 4x4 array ``R[mu, nu] = Tr(rho sigma_mu (x) sigma_nu)``.

    ``R[0, 0] = 1``, ``R[1:, 0] = x``, ``R[0, 1:] = y``, ``R[1:, 1:] = T``.
    Accepts stacks.
    """
    m = as_matrix(rho)
    r = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    # Tr(rho (A (x) B)) = sum rho[a b, c d] A[c, a] B[d, b]
    out = np.einsum("...abcd,mca,ndb->...mn", r, SIGMA4, SIGMA4, optimize=True)
    return out.real


def bloch_decompose(rho):
    R = correlation_tensor(rho)
    return BlochForm(x=R[1:, 0].copy(), y=R[0, 1:].copy(), T=R[1:, 1:].copy())


def bloch_matrix(R):
    """Inverse of :func:`correlation_tensor` without validation."""
    R = np.asarray(R, dtype=float)
    m = np.einsum("...mn,mac,nbd->...abcd", R, SIGMA4, SIGMA4, optimize=True) / 4
    return m.reshape(m.shape[:-4] + (4, 4))


def bloch_compose(b):
    R = np.zeros((4, 4))
    R[0, 0] = 1
    R[1:, 0] = b.x
    R[0, 1:] = b.y
    R[1:, 1:] = b.T
    try:
        return make_state(bloch_matrix(R))
    except InvalidStateError as exc:
        if exc.invariant == "positivity":
            raise InvalidStateError("positivity", exc.magnitude,
                                    f"not a physical state: {exc}") from None
        raise


def reduce(rho, keep="A"):
    """Partial trace keeping subsystem ``'A'`` or ``'B'``."""
    m = as_matrix(rho)
    r = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    if keep == "A":
        return np.einsum("...abcb->...ac", r)
    if keep == "B":
        return np.einsum("...abad->...bd", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose_B(rho):
    m = as_matrix(rho)
    r = m.reshape(m.shape[:-2] + (2, 2, 2, 2))
    return np.swapaxes(r, -1, -3).reshape(m.shape)


def min_pt_eigenvalue(rho):
    pt = partial_transpose_B(rho)
    return np.linalg.eigvalsh(0.5 * (pt + dagger(pt)))[..., 0]


def is_ppt(rho, tol=PPT_TOL):
    """Positive partial transpose, i.e. separable for two qubits."""
    res = min_pt_eigenvalue(rho) >= -tol
    return bool(res) if np.ndim(res) == 0 else res


# --- families -------------------------------------------------------------

def from_bell_basis(m):
    """Conjugate a Bell-basis matrix (or stack) into computational basis."""
    return BELL_BASIS @ np.asarray(m, dtype=complex) @ BELL_BASIS.conj().T


def to_bell_basis(rho):
    return BELL_BASIS.conj().T @ as_matrix(rho) @ BELL_BASIS


def _check_domain(name, value, lo, hi):
    v = np.asarray(value, dtype=float)
    if np.any(v < lo - 1e-15) or np.any(v > hi + 1e-15) or np.any(~np.isfinite(v)):
        raise InvalidStateError("domain", float(np.max(np.abs(v))),
                                f"{name} parameter must lie in [{lo:g}, {hi:g}], got {value}")
    return v


def _bell_diagonal_stack(p):
    p = np.asarray(p, dtype=float)
    diag = np.zeros(p.shape[:-1] + (4, 4))
    idx = np.arange(4)
    diag[..., idx, idx] = p
    return from_bell_basis(diag)


def _schmidt_stack(theta):
    t = _check_domain("schmidt", theta, 0.0, math.pi / 2)
    psi = np.zeros(t.shape + (4,), dtype=complex)
    psi[..., 0] = np.cos(t)
    psi[..., 3] = np.sin(t)
    return psi[..., :, None] * psi[..., None, :].conj()


def _werner_stack(x):
    x = _check_domain("werner", x, 0.0, 1 / 3)
    return _bell_diagonal_stack(np.stack([1 - 3 * x, x, x, x], axis=-1))


def _mnms_stack(x):
    x = _check_domain("mnms", x, 0.0, 0.5)
    z = np.zeros_like(x)
    return _bell_diagonal_stack(np.stack([1 - x, x, z, z], axis=-1))


def mems_g(x):
    x = np.asarray(x, dtype=float)
    return np.where(x <= 2 / 3, 1 / 3, x / 2)


def _mems_stack(x):
    x = _check_domain("mems", x, 0.0, 1.0)
    g = mems_g(x)
    a = (1 - 2 * g) / 2
    m = np.zeros(x.shape + (4, 4))
    m[..., 0, 0] = g + x / 2
    m[..., 1, 1] = g - x / 2
    m[..., 2:, 2:] = a[..., None, None]
    return from_bell_basis(m)


def _bell_spec_stack(specs):
    p = np.asarray([BellDiagonalSpec(tuple(s)).p if not isinstance(s, BellDiagonalSpec) else s.p
                    for s in np.atleast_2d(specs)])
    return _bell_diagonal_stack(p)


FAMILY_DOMAINS = {
    "werner": (0.0, 1 / 3),
    "mems": (0.0, 1.0),
    "mnms": (0.0, 0.5),
    "schmidt": (0.0, math.pi / 2),
    "bell-diagonal": None,
}

_FAMILY_BUILDERS = {
    "werner": _werner_stack,
    "mems": _mems_stack,
    "mnms": _mnms_stack,
    "schmidt": _schmidt_stack,
    "bell-diagonal": _bell_spec_stack,
}


def family_states(name, grid):
    """Stack of family members for every point of ``grid``.

    For ``bell-diagonal`` the grid entries are 4-weight spectra.
    """
    try:
        build = _FAMILY_BUILDERS[name]
    except KeyError:
        raise ValueError(
            f"unknown family {name!r}; valid names: {', '.join(_FAMILY_BUILDERS)}"
        ) from None
    return build(grid)


def schmidt_pure(theta):
    """cos(theta)|00> + sin(theta)|11>, theta in [0, pi/2]."""
    return make_state(_schmidt_stack(theta))


def werner(x):
    """Bell-diagonal diag(1-3x, x, x, x), x in [0, 1/3]."""
    return make_state(_werner_stack(x))


def mems(x):
    """Maximally entangled mixed state with concurrence x in [0, 1]."""
    return make_state(_mems_stack(x))


def mnms(x):
    """Maximally nonlocal mixed state, Bell-diagonal diag(1-x, x, 0, 0)."""
    return make_state(_mnms_stack(x))


def bell_diagonal(spec):
    if not isinstance(spec, BellDiagonalSpec):
        spec = BellDiagonalSpec(tuple(spec))
    return make_state(_bell_diagonal_stack(spec.p))


def bell_state(label="phi+"):
    k = BELL_LABELS.index(label)
    p = np.zeros(4)
    p[k] = 1
    return bell_diagonal(p)


def classical_quantum(p, rho0, rho1, u=None, side="A"):
    """``p |e0><e0| (x) rho0 + (1-p) |e1><e1| (x) rho1``.

    ``{e0, e1}`` is the computational basis rotated by the single-qubit
    unitary ``u``. With ``side='B'`` the classical register sits on B.
    """
    u = I2 if u is None else np.asarray(u)
    e0 = u[:, [0]] @ u[:, [0]].conj().T
    e1 = u[:, [1]] @ u[:, [1]].conj().T
    rho0 = np.asarray(rho0)
    rho1 = np.asarray(rho1)
    if side == "A":
        m = p * kron2(e0, rho0) + (1 - p) * kron2(e1, rho1)
    elif side == "B":
        m = p * kron2(rho0, e0) + (1 - p) * kron2(rho1, e1)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return make_state(m)


# --- state files ----------------------------------------------------------

_STRIP = re.compile(r"[\[\](),]")


def parse_state_text(text):
    """Parse 16 complex entries written as ``re im`` pairs, row-major.

    One entry per line; ``#`` starts a comment; brackets and commas are
    ignored so ``[re, im]`` also works.
    """
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _STRIP.sub(" ", raw.split("#", 1)[0]).strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise StateFileError(lineno, f"expected 're im', got {len(fields)} field(s)")
        try:
            re_, im_ = (float(f) for f in fields)
        except ValueError:
            bad = next(f for f in fields if not _is_float(f))
            raise StateFileError(lineno, f"field {bad!r} is not a number") from None
        values.append(complex(re_, im_))
    if len(values) != 16:
        raise StateFileError(len(text.splitlines()), f"expected 16 entries, found {len(values)}")
    return np.array(values).reshape(4, 4)


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_state_file(path):
    return parse_state_text(Path(path).read_text())


def format_state_text(rho):
    lines = ["# 16 entries, row-major, basis |00>,|01>,|10>,|11>: re im"]
    for z in as_matrix(rho).ravel():
        lines.append(f"{float(z.real)!r} {float(z.imag)!r}")
    return "\n".join(lines) + "\n"
