"""
Probability sweeps and critical-probability extraction.

For every run ``r`` and grid point ``P_i`` a fresh configuration is drawn,
its clusters labeled and ``M`` recorded.  ``P_c`` for a run is the midpoint
of the grid step where ``M`` increases fastest.

Child seeds are ``SeedSequence(master_seed, spawn_key=(b, l, family, N, r, i))``
with ``family`` encoded as 0 (central) / 1 (scattered).  The connectivity is
deliberately not part of the key, so ``nn4`` and ``nnn8`` sweeps of the same
lattice see identical configurations.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, ParameterError
from .lattice import CarpetSpec, Family, SiteLattice
from .percolation import Connectivity, label_clusters_scan, occupy, second_moment

log = logging.getLogger(__name__)

_FAMILY_CODE = {Family.CENTRAL: 0, Family.SCATTERED: 1}


@dataclass(frozen=True)
class SweepGrid:
    p_min: float = 0.30
    p_max: float = 0.95
    dp: float = 0.01
    runs: int = 10
    master_seed: int = 1

    def __post_init__(self):
        if self.dp <= 0:
            raise ParameterError(f"dp must be positive, got {self.dp}")
        if not self.p_min < self.p_max:
            raise ParameterError(f"p_min must be below p_max, got {self.p_min} >= {self.p_max}")
        if self.p_min < 0 or self.p_max > 1:
            raise ParameterError("grid must lie inside [0, 1]")
        if self.runs < 1:
            raise ParameterError(f"runs must be >= 1, got {self.runs}")

    @property
    def points(self) -> np.ndarray:
        n = int(math.floor((self.p_max - self.p_min) / self.dp + 1e-9))
        return np.round(self.p_min + self.dp * np.arange(n + 1), 12)


@dataclass(eq=False)
class SweepResult:
    spec: CarpetSpec
    conn: Connectivity
    grid: SweepGrid
    p_grid: np.ndarray
    m_per_run: np.ndarray  # (runs, len(p_grid)); NaN where nothing was occupied
    m_mean: np.ndarray = field(init=False)
    m_stderr: np.ndarray = field(init=False)

    def __post_init__(self):
        self.conn = Connectivity(self.conn)
        self.m_mean, self.m_stderr = _mean_and_stderr(self.m_per_run)


@dataclass
class PcEstimate:
    pc_mean: float
    pc_stderr: float
    per_run_pc: list
    spec: CarpetSpec
    conn: Connectivity
    pc_from_mean_m: float = float("nan")

    @property
    def runs(self) -> int:
        return len(self.per_run_pc)


def _mean_and_stderr(values: np.ndarray, axis: int = 0):
    values = np.asarray(values, dtype=np.float64)
    n = np.sum(~np.isnan(values), axis=axis)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.nansum(values, axis=axis) / n
        if values.shape[axis] > 1:
            sd = np.sqrt(np.nansum((values - np.expand_dims(mean, axis)) ** 2, axis=axis) / (n - 1))
            stderr = np.where(n > 1, sd / np.sqrt(n), 0.0)
        else:
            stderr = np.zeros_like(mean)
    return mean, stderr


def derive_seed(master_seed: int, spec: CarpetSpec, run: int, index: int) -> np.random.SeedSequence:
    key = (spec.b, spec.l, _FAMILY_CODE[spec.family], spec.N, run, index)
    return np.random.SeedSequence(master_seed, spawn_key=key)


def _single_run(lattice, conn, grid, run, points):
    out = np.full(len(points), np.nan)
    for i, p in enumerate(points):
        config = occupy(lattice, float(p), derive_seed(grid.master_seed, lattice.spec, run, i))
        sizes = label_clusters_scan(config, conn).sizes
        if sizes.size:
            out[i] = second_moment(sizes)
    return out


def run_sweep(lattice: SiteLattice, conn: Connectivity | str, grid: SweepGrid, workers: int = 1) -> SweepResult:
    """Evaluate M on every (run, grid point); rows fill by index so worker count never changes results."""
    conn = Connectivity(conn)
    if lattice.n_present == 0:
        raise ParameterError("lattice has no sites")
    points = grid.points
    m = np.empty((grid.runs, len(points)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {r: pool.submit(_single_run, lattice, conn, grid, r, points) for r in range(grid.runs)}
            for r, fut in futures.items():
                m[r] = fut.result()
    else:
        for r in range(grid.runs):
            m[r] = _single_run(lattice, conn, grid, r, points)
    return SweepResult(lattice.spec, conn, grid, points, m)


def estimate_pc_single(p_grid, m_values) -> float:
    """Midpoint of the step with the largest forward difference of M.

    Leading NaN entries (no occupied site at low P) are dropped; ties go to
    the smallest P.
    """
    p = np.asarray(p_grid, dtype=np.float64)
    m = np.asarray(m_values, dtype=np.float64)
    if p.shape != m.shape:
        raise ParameterError("p_grid and m_values differ in length")
    valid = ~np.isnan(m)
    if not valid.any():
        raise InsufficientDataError("no valid grid points")
    start = int(np.argmax(valid))
    p, m = p[start:], m[start:]
    if np.isnan(m).any():
        raise InsufficientDataError("missing values after the first valid grid point")
    if len(p) < 2:
        raise InsufficientDataError("need at least two valid grid points")
    slope = np.diff(m) / np.diff(p)
    i = int(np.argmax(slope))
    return float((p[i] + p[i + 1]) / 2)


def estimate_pc(sweep: SweepResult) -> PcEstimate:
    per_run = [estimate_pc_single(sweep.p_grid, row) for row in sweep.m_per_run]
    mean, stderr = _mean_and_stderr(np.array(per_run)[:, None])
    averaged = estimate_pc_single(sweep.p_grid, sweep.m_mean)
    est = PcEstimate(
        pc_mean=float(mean[0]),
        pc_stderr=float(stderr[0]),
        per_run_pc=per_run,
        spec=sweep.spec,
        conn=sweep.conn,
        pc_from_mean_m=averaged,
    )
    log.info(
        "%s %s: P_c = %.4f +/- %.4f (from averaged M: %.4f)",
        sweep.spec.label(), sweep.conn.value, est.pc_mean, est.pc_stderr, averaged,
    )
    return est
