"""Random two-qubit states under the product measure Haar x flat simplex.

All samplers take a :class:`numpy.random.Generator`; use
:func:`make_rng` (or :class:`RngStream`) to get reproducible, independent
streams keyed by ``(seed, stream_id)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import unitary_from_gaussian, LinAlgError
from .qstate import DensityMatrix, make_state

DIM = 4
_BLOCK = 1024


class SamplingBudgetError(RuntimeError):
    """Rejection sampling ran out of attempts."""


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def generator(self):
        return make_rng(self.seed, self.stream_id)


def make_rng(seed, stream_id=0):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.PCG64(ss))


def complex_gaussian(rng, shape):
    """I.i.d. standard complex normals, E|z|^2 = 1."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def sample_simplex(rng, size=None):
    """Uniform point(s) on the probability simplex of dimension 4."""
    shape = (DIM,) if size is None else (size, DIM)
    e = rng.standard_exponential(shape)
    return e / e.sum(axis=-1, keepdims=True)


def sample_haar_unitary(rng, size=None):
    shape = (DIM, DIM) if size is None else (size, DIM, DIM)
    while True:
        try:
            return unitary_from_gaussian(complex_gaussian(rng, shape))
        except LinAlgError:
            # probability zero in exact arithmetic; redraw
            continue


def sample_mixed_states(rng, n, return_spectrum=False):
    """Stack of ``n`` states U diag(lambda) U^dagger."""
    lam = sample_simplex(rng, n)
    u = sample_haar_unitary(rng, n)
    rho = (u * lam[:, None, :]) @ np.swapaxes(u.conj(), -1, -2)
    rho = 0.5 * (rho + np.swapaxes(rho.conj(), -1, -2))
    return (rho, lam) if return_spectrum else rho


def sample_pure_states(rng, n):
    psi = complex_gaussian(rng, (n, DIM))
    psi /= np.linalg.norm(psi, axis=-1, keepdims=True)
    return psi[:, :, None] * psi[:, None, :].conj()


def sample_mixed_state(rng):
    return make_state(sample_mixed_states(rng, 1)[0])


def sample_pure_state(rng):
    return make_state(sample_pure_states(rng, 1)[0])


def _purity(m):
    return (np.abs(m) ** 2).sum(axis=(-1, -2))


def sample_many_at_R(rng, target, n, half_width=0.02, budget=10**6):
    """Collect ``n`` mixed states with ``|R - target| <= half_width``.

    Returns ``(states, attempts)``. ``target == 1`` delegates to the pure
    sampler. Raises :class:`SamplingBudgetError` when ``budget`` draws are
    exhausted first.
    """
    if not 1.0 <= target <= 4.0:
        raise ValueError(f"target R must lie in [1, 4], got {target}")
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    if target == 1.0:
        return sample_pure_states(rng, n), n
    kept = []
    found = 0
    attempts = 0
    while found < n:
        if attempts >= budget:
            raise SamplingBudgetError(
                f"only {found}/{n} states with R in [{target - half_width:g}, "
                f"{target + half_width:g}] after {attempts} draws; widen the band"
            )
        block = min(_BLOCK, budget - attempts)
        rho = sample_mixed_states(rng, block)
        hit = np.flatnonzero(np.abs(1.0 / _purity(rho) - target) <= half_width)
        need = n - found
        if hit.size >= need:
            hit = hit[:need]
            attempts += int(hit[-1]) + 1
        else:
            attempts += block
        kept.append(rho[hit])
        found += hit.size
    return np.concatenate(kept), attempts


def sample_at_R(rng, target, half_width=0.02, budget=10**6):
    """One state in the participation-ratio band, plus the draw count."""
    states, attempts = sample_many_at_R(rng, target, 1, half_width, budget)
    return make_state(states[0]), attempts
