"""Small dense complex linear algebra for qubit and two-qubit operators.

Everything here works on single matrices or on stacks of matrices with
shape ``(..., d, d)``; the survey code relies on the stacked form.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)
PAULI_STACK = np.stack(PAULIS)

# sigma_y (x) sigma_y, used for the spin flip in the concurrence.
YY = np.kron(SY, SY)

QR_DIAG_FLOOR = 1e-14


class LinAlgError(ValueError):
    """Raised when an input violates a structural precondition."""


def hermiticity_deviation(h):
    h = np.asarray(h)
    return np.abs(h - np.swapaxes(h.conj(), -1, -2)).max(axis=(-1, -2))


def hermitian_eig(h, tol=1e-10):
    """Eigen-decomposition of a Hermitian matrix (or stack of them).

    Returns ascending eigenvalues and the matching orthonormal eigenvectors
    as columns. Inputs further than ``tol`` from Hermitian are rejected.
    """
    h = np.asarray(h, dtype=complex)
    dev = np.max(hermiticity_deviation(h))
    if dev > tol:
        raise LinAlgError(f"matrix is not Hermitian: max |H - H^dagger| = {dev:.3g}")
    h = 0.5 * (h + np.swapaxes(h.conj(), -1, -2))
    return np.linalg.eigh(h)


def hermitian_eigvals(h):
    """Ascending eigenvalues; no Hermiticity check (hot path)."""
    h = np.asarray(h)
    return np.linalg.eigvalsh(0.5 * (h + np.swapaxes(h.conj(), -1, -2)))


def unitary_from_gaussian(g):
    """Map a full-rank complex matrix to a unitary via QR.

    The phases of ``Q``'s columns are fixed so that ``R`` has a real positive
    diagonal. With i.i.d. standard complex Gaussian input the output is
    Haar distributed. Works on stacks.
    """
    g = np.asarray(g, dtype=complex)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    mag = np.abs(d)
    if np.any(mag < QR_DIAG_FLOOR):
        raise LinAlgError(
            f"rank-deficient input: |R_ii| = {mag.min():.3g} below {QR_DIAG_FLOOR:g}"
        )
    return q * (d / mag)[..., None, :]


def kron2(a, b):
    """Kronecker product of two 2x2 matrices, subsystem A as left factor."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-2:] != (2, 2) or b.shape[-2:] != (2, 2):
        raise LinAlgError(f"kron2 needs 2x2 factors, got {a.shape} and {b.shape}")
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(out.shape[:-4] + (4, 4))


def sym3_spectrum(s, tol=1e-12):
    """Descending eigenvalues of a real symmetric 3x3 matrix (or stack)."""
    s = np.asarray(s, dtype=float)
    if s.shape[-2:] != (3, 3):
        raise LinAlgError(f"expected 3x3 input, got {s.shape}")
    dev = np.abs(s - np.swapaxes(s, -1, -2)).max()
    if dev > tol:
        raise LinAlgError(f"matrix is not symmetric: max |S - S^t| = {dev:.3g}")
    return np.linalg.eigvalsh(0.5 * (s + np.swapaxes(s, -1, -2)))[..., ::-1]


def dagger(m):
    return np.swapaxes(np.asarray(m).conj(), -1, -2)
