"""Monte Carlo survey: sampled records, histograms, R-binning, family curves.

Samples are drawn in fixed-size chunks; chunk ``k`` uses RNG stream ``k`` of
the campaign seed, so results do not depend on how many workers run.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import measures
from .measures import MeasureRecord, measure_columns, record_from_columns
from .qstate import FAMILY_DOMAINS, family_states
from .sampling import make_rng, sample_many_at_R, sample_mixed_states, sample_pure_states

COLUMNS = ("D", "discord", "cc", "qmi", "concurrence", "R", "chsh", "ppt", "corr_rank")
FIXED_R_TARGETS = (1.0, 1.3, 1.6, 2.0, 2.3, 2.6, 3.0, 3.3, 3.8)
ENVELOPE_TOL = 1e-9


class SurveyAborted(RuntimeError):
    def __init__(self, message, completed_chunks, partial):
        super().__init__(message)
        self.completed_chunks = completed_chunks
        self.partial = partial


def default_r_edges(n_bins=30):
    return np.linspace(1.0, 4.0, n_bins + 1)


@dataclass
class SurveyConfig:
    n_samples: int
    seed: int = 42
    workers: int = 1
    r_edges: Sequence[float] = field(default_factory=default_r_edges)
    with_discord: bool = False
    grid: tuple = measures.DEFAULT_GRID
    refine_tol: float = measures.DEFAULT_REFINE_TOL
    fixed_r_targets: Sequence[float] = FIXED_R_TARGETS
    r_band: float = 0.02
    hist_bins: int = 100
    ensemble: str = "mixed"
    chunk_size: int = 10_000

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ValueError(f"n_samples must be a positive integer, got {self.n_samples}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        edges = np.asarray(self.r_edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("r_edges must be strictly increasing")
        if edges[0] < 1.0 or edges[-1] > 4.0:
            raise ValueError("r_edges must lie within [1, 4]")
        if self.ensemble not in ("mixed", "pure"):
            raise ValueError(f"ensemble must be 'mixed' or 'pure', got {self.ensemble!r}")
        if self.chunk_size < 1 or self.hist_bins < 1:
            raise ValueError("chunk_size and hist_bins must be positive")


class Records:
    """Columnar, index-ordered collection of :class:`MeasureRecord`."""

    def __init__(self, index, cols):
        self.index = np.asarray(index, dtype=np.int64)
        self.cols = {k: np.asarray(cols[k]) for k in COLUMNS}

    def __len__(self):
        return self.index.size

    def __getitem__(self, key):
        if isinstance(key, (int, np.integer)):
            return record_from_columns(self.cols, key)
        return Records(self.index[key], {k: v[key] for k, v in self.cols.items()})

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __getattr__(self, name):
        cols = self.__dict__.get("cols")
        if cols is not None and name in cols:
            return cols[name]
        raise AttributeError(name)

    def select(self, mask):
        return self[np.asarray(mask, dtype=bool)]

    @classmethod
    def concat(cls, parts):
        parts = list(parts)
        if not parts:
            return cls(np.zeros(0), {k: np.zeros(0) for k in COLUMNS})
        return cls(
            np.concatenate([p.index for p in parts]),
            {k: np.concatenate([p.cols[k] for p in parts]) for k in COLUMNS},
        )

    def equals(self, other):
        if len(self) != len(other) or not np.array_equal(self.index, other.index):
            return False
        return all(np.array_equal(self.cols[k], other.cols[k], equal_nan=True) for k in COLUMNS)


def _run_chunk(args):
    cfg, k = args
    start = k * cfg.chunk_size
    n = min(cfg.chunk_size, cfg.n_samples - start)
    rng = make_rng(cfg.seed, k)
    if cfg.ensemble == "pure":
        states = sample_pure_states(rng, n)
    else:
        states = sample_mixed_states(rng, n)
    cols = measure_columns(states, cfg.with_discord, cfg.grid, cfg.refine_tol)
    return Records(np.arange(start, start + n), cols)


def run_survey(cfg: SurveyConfig) -> Records:
    n_chunks = math.ceil(cfg.n_samples / cfg.chunk_size)
    jobs = [(cfg, k) for k in range(n_chunks)]
    done = []
    try:
        if cfg.workers == 1 or n_chunks == 1:
            for job in jobs:
                done.append(_run_chunk(job))
        else:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for part in pool.map(_run_chunk, jobs):
                    done.append(part)
    except Exception as exc:
        raise SurveyAborted(
            f"survey aborted after {len(done)}/{n_chunks} chunks: {exc}",
            list(range(len(done))),
            Records.concat(done),
        ) from exc
    return Records.concat(done)


# --- reductions -----------------------------------------------------------

@dataclass
class Histogram:
    edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    overflow: int = 0

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def histogram(values, edges) -> Histogram:
    """Unit-integral histogram; values outside ``edges`` go to ``overflow``."""
    values = np.asarray(values, dtype=float).ravel()
    edges = np.asarray(edges, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("histogram values must be finite")
    counts, _ = np.histogram(values, bins=edges)
    overflow = values.size - int(counts.sum())
    total = counts.sum()
    widths = np.diff(edges)
    density = counts / (total * widths) if total else np.zeros(counts.shape)
    return Histogram(edges, density, counts, overflow)


@dataclass
class BinnedCurve:
    edges: np.ndarray
    centers: np.ndarray
    mean: np.ndarray
    max: np.ndarray
    min: np.ndarray
    count: np.ndarray
    sem: np.ndarray


def bin_by_r(records, edges, field="D") -> BinnedCurve:
    """Per-R-bin mean / max / min / count / standard error of one column.

    Records with NaN in ``field`` are skipped. Empty bins have count 0 and
    NaN statistics.
    """
    if len(records) == 0:
        raise ValueError("bin_by_r needs at least one record")
    edges = np.asarray(edges, dtype=float)
    r = records.cols["R"]
    v = records.cols[field].astype(float)
    ok = ~np.isnan(v)
    r, v = r[ok], v[ok]
    # round-off puts pure states at R = 1 - 1e-16
    r = np.where(np.abs(r - edges[0]) < 1e-9, edges[0], r)
    r = np.where(np.abs(r - edges[-1]) < 1e-9, edges[-1], r)
    nb = edges.size - 1
    idx = np.searchsorted(edges, r, side="right") - 1
    idx[r == edges[-1]] = nb - 1
    inside = (idx >= 0) & (idx < nb)
    idx, v = idx[inside], v[inside]
    count = np.bincount(idx, minlength=nb)
    s1 = np.bincount(idx, weights=v, minlength=nb)
    s2 = np.bincount(idx, weights=v * v, minlength=nb)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = s1 / count
        var = np.where(count > 1, (s2 - count * mean**2) / np.maximum(count - 1, 1), np.nan)
        sem = np.sqrt(np.clip(var, 0, None) / count)
    vmax = np.full(nb, np.nan)
    vmin = np.full(nb, np.nan)
    np.fmax.at(vmax, idx, v)
    np.fmin.at(vmin, idx, v)
    return BinnedCurve(edges, 0.5 * (edges[:-1] + edges[1:]), mean, vmax, vmin, count, sem)


# --- analytic families ----------------------------------------------------

class FamilyPoint(NamedTuple):
    parameter: float
    R: float
    D: float
    discord: Optional[float]
    cc: Optional[float]
    concurrence: float
    chsh: float


def family_grid(family, start=None, stop=None, steps=101):
    lo, hi = FAMILY_DOMAINS[family]
    start = lo if start is None else start
    stop = hi if stop is None else stop
    return np.linspace(start, stop, steps)


def family_curve(family, grid, with_discord=False, grid_res=measures.DEFAULT_GRID,
                 refine_tol=measures.DEFAULT_REFINE_TOL):
    """Evaluate a named family on ``grid`` through the measures module."""
    if family not in FAMILY_DOMAINS:
        raise ValueError(f"unknown family {family!r}; valid names: {', '.join(FAMILY_DOMAINS)}")
    states = family_states(family, grid)
    cols = measure_columns(states, with_discord, grid_res, refine_tol)
    if family == "bell-diagonal":
        params = np.arange(len(states), dtype=float)
    else:
        params = np.asarray(grid, dtype=float)

    def opt(v):
        return None if np.isnan(v) else float(v)

    return [
        FamilyPoint(float(params[i]), float(cols["R"][i]), float(cols["D"][i]),
                    opt(cols["discord"][i]), opt(cols["cc"][i]),
                    float(cols["concurrence"][i]), float(cols["chsh"][i]))
        for i in range(len(states))
    ]


def werner_envelope(R):
    """Largest geometric discord at participation ratio R: (4/R - 1)/6."""
    return (4.0 / np.asarray(R, dtype=float) - 1.0) / 6.0


def chsh_lower_curve(D):
    """Werner-family lower boundary of the (D, B) region: 4 sqrt(D)."""
    return 4.0 * np.sqrt(np.clip(D, 0, None))


@dataclass
class UpperCurve:
    """MNMS-tabulated upper boundary B = U(D), linear interpolation in D."""

    D: np.ndarray
    B: np.ndarray

    @classmethod
    def from_mnms(cls, n_points=100_001):
        pts = family_curve("mnms", np.linspace(0.0, 0.5, n_points))
        d = np.array([p.D for p in pts])
        b = np.array([p.chsh for p in pts])
        order = np.argsort(d)
        return cls(d[order], b[order])

    def __call__(self, D):
        return np.interp(D, self.D, self.B)

    def printed_formula_report(self):
        """Compare against 2 sqrt(1 - 2D) and 2 sqrt(1 + 2D)."""
        printed = 2 * np.sqrt(np.clip(1 - 2 * self.D, 0, None))
        combined = 2 * np.sqrt(1 + 2 * self.D)
        return {
            "max_abs_dev_printed_2sqrt(1-2D)": float(np.max(np.abs(self.B - printed))),
            "max_abs_dev_2sqrt(1+2D)": float(np.max(np.abs(self.B - combined))),
            "U(1/2)": float(self(0.5)),
            "printed_at_1/2": 0.0,
        }


def fixed_r_ensembles(cfg: SurveyConfig, n_per_target):
    """Geometric discord samples for each fixed-R target (banded selection).

    Returns ``{target: (D values, attempts)}``; target ``t`` uses stream
    ``10**6 + i`` of the campaign seed.
    """
    out = {}
    for i, target in enumerate(cfg.fixed_r_targets):
        rng = make_rng(cfg.seed, 10**6 + i)
        states, attempts = sample_many_at_R(rng, target, n_per_target, cfg.r_band)
        out[float(target)] = (measures.geometric_discord(states), attempts)
    return out
