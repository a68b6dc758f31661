"""Pilot for the discord / geometric-discord rank-correlation threshold.

Everything here is independent of the production code: states come from
GUE-eigenvector unitaries and numpy's Dirichlet sampler, discord from an
explicit-matrix sphere scan and D from a direct dephasing-distance search.
The printed values are frozen into tests/test_acceptance.py.

    python3 tests/pilots/spearman_pilot.py
"""

import math
import os
import sys
import time

import numpy as np
from scipy.stats import spearmanr

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from oracles import brute_force_discord, brute_force_geometric_discord, fibonacci_sphere, haar_via_gue  # noqa: E402

SEED = 91_357
N = 2000


def main(n=N, seed=SEED):
    rng = np.random.default_rng(seed)
    u = haar_via_gue(rng, n)
    lam = rng.dirichlet(np.ones(4), size=n)
    rhos = np.einsum("kab,kb,kcb->kac", u, lam, u.conj())
    axes = fibonacci_sphere(4000)
    t0 = time.time()
    delta = np.array([brute_force_discord(r, axes)[0] for r in rhos])
    geo = np.array([brute_force_geometric_discord(r, n_axes=2000) for r in rhos])
    rho_hat = spearmanr(delta, geo).statistic
    threshold = math.tanh(math.atanh(rho_hat) - 4 * math.sqrt(1.06 / (n - 3)))
    print(f"n = {n}  seed = {seed}  elapsed = {time.time() - t0:.1f} s")
    print(f"spearman = {float(rho_hat)!r}")
    print(f"threshold = {threshold!r}")
    return rho_hat, threshold


if __name__ == "__main__":
    main()
