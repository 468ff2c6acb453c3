"""
Site occupation, cluster labeling and the normalized second moment.

Labeling follows the raster scan of Hoshen and Kopelman: each occupied site
looks at its already-visited neighbours (west and north, plus north-west and
north-east for ``nnn8``), joins the cluster with the smallest serial number
and merges any other touching cluster into it.  Cluster identities are kept
in a union-find forest instead of rewriting labels in place.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from .errors import ParameterError, UndefinedStatisticError
from .lattice import SiteLattice


class Connectivity(str, enum.Enum):
    NN4 = "nn4"
    NNN8 = "nnn8"

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        axial = ((-1, 0), (1, 0), (0, -1), (0, 1))
        if self is Connectivity.NN4:
            return axial
        return axial + ((-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True, eq=False)
class Configuration:
    lattice: SiteLattice
    occupied: np.ndarray = field(repr=False)
    p: float
    seed: tuple

    @property
    def n_occupied(self) -> int:
        return int(self.occupied.sum())


@dataclass(eq=False)
class ClusterLabels:
    """``label`` uses 0 for empty sites and ``1..k`` for clusters; ``sizes[k-1]`` is cluster k's size."""

    label: np.ndarray = field(repr=False)
    sizes: np.ndarray

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def seed_record(ss: np.random.SeedSequence) -> tuple:
    return (ss.entropy, tuple(ss.spawn_key))


def occupy(lattice: SiteLattice, p: float, seed) -> Configuration:
    """Occupy each present site independently with probability ``p``.

    One uniform ``y`` in [0, 1) is drawn per grid position in row-major
    order from a PCG64 generator seeded by ``seed`` (an int or a
    ``numpy.random.SeedSequence``); a present site is occupied iff ``y <= p``.
    Draws are made for absent positions too, so the stream layout depends
    only on the grid size.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"occupation probability must lie in [0, 1], got {p}")
    ss = as_seed_sequence(seed)
    rng = np.random.Generator(np.random.PCG64(ss))
    y = rng.random(lattice.present.shape)
    occupied = lattice.present & (y <= p)
    return Configuration(lattice, occupied, float(p), seed_record(ss))


@numba.njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(cache=True, nogil=True)
def _hk_scan(occ, diagonal):
    rows, cols = occ.shape
    raw = np.zeros((rows, cols), dtype=np.int64)
    parent = np.zeros(rows * cols + 1, dtype=np.int64)
    size = np.zeros(rows * cols + 1, dtype=np.int64)
    nxt = 1
    roots = np.empty(4, dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            if not occ[i, j]:
                continue
            k = 0
            if j > 0 and occ[i, j - 1]:
                roots[k] = _find(parent, raw[i, j - 1])
                k += 1
            if i > 0:
                if occ[i - 1, j]:
                    roots[k] = _find(parent, raw[i - 1, j])
                    k += 1
                if diagonal:
                    if j > 0 and occ[i - 1, j - 1]:
                        roots[k] = _find(parent, raw[i - 1, j - 1])
                        k += 1
                    if j + 1 < cols and occ[i - 1, j + 1]:
                        roots[k] = _find(parent, raw[i - 1, j + 1])
                        k += 1
            if k == 0:
                parent[nxt] = nxt
                size[nxt] = 1
                raw[i, j] = nxt
                nxt += 1
                continue
            keep = roots[0]
            for t in range(1, k):
                if roots[t] < keep:
                    keep = roots[t]
            for t in range(k):
                r = _find(parent, roots[t])
                if r != keep:
                    # later serial number folds into the earlier one
                    parent[r] = keep
                    size[keep] += size[r]
                    size[r] = 0
            size[keep] += 1
            raw[i, j] = keep

    # compact to 1..k in order of first appearance in the scan
    final = np.zeros(nxt, dtype=np.int64)
    sizes = np.zeros(nxt, dtype=np.int64)
    count = 0
    label = np.zeros((rows, cols), dtype=np.int32)
    for i in range(rows):
        for j in range(cols):
            if raw[i, j] == 0:
                continue
            r = _find(parent, raw[i, j])
            if final[r] == 0:
                count += 1
                final[r] = count
                sizes[count - 1] = size[r]
            label[i, j] = final[r]
    return label, sizes[:count].copy()


def label_clusters_scan(config: Configuration | np.ndarray, conn: Connectivity | str) -> ClusterLabels:
    occ = config.occupied if isinstance(config, Configuration) else np.asarray(config, dtype=bool)
    conn = Connectivity(conn)
    label, sizes = _hk_scan(np.ascontiguousarray(occ, dtype=np.bool_), conn is Connectivity.NNN8)
    return ClusterLabels(label, sizes)


def label_clusters_oracle(config: Configuration | np.ndarray, conn: Connectivity | str) -> ClusterLabels:
    """Breadth-first flood fill; slow, used to check the scan labeler."""
    occ = config.occupied if isinstance(config, Configuration) else np.asarray(config, dtype=bool)
    offsets = Connectivity(conn).offsets
    rows, cols = occ.shape
    label = np.zeros((rows, cols), dtype=np.int32)
    sizes = []
    for i0, j0 in zip(*np.nonzero(occ)):
        if label[i0, j0]:
            continue
        current = len(sizes) + 1
        label[i0, j0] = current
        queue = deque([(i0, j0)])
        n = 0
        while queue:
            i, j = queue.popleft()
            n += 1
            for di, dj in offsets:
                a, c = i + di, j + dj
                if 0 <= a < rows and 0 <= c < cols and occ[a, c] and not label[a, c]:
                    label[a, c] = current
                    queue.append((a, c))
        sizes.append(n)
    return ClusterLabels(label, np.array(sizes, dtype=np.int64))


def same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    """True if two label maps induce the same partition (numbering may differ)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or not np.array_equal(a == 0, b == 0):
        return False
    mask = a != 0
    pairs = np.unique(np.stack([a[mask], b[mask]]), axis=1)
    return pairs.shape[1] == len(np.unique(a[mask])) == len(np.unique(b[mask]))


def second_moment(sizes) -> float:
    """M = sum(S_i**2) / (sum S_i)**2 over all clusters."""
    s = np.asarray(sizes, dtype=np.float64)
    if s.size == 0:
        raise UndefinedStatisticError("second moment of an empty cluster list is undefined")
    total = s.sum()
    return float(np.dot(s, s) / (total * total))


# -- export ---------------------------------------------------------------


def cluster_colors(n: int, seed: int = 0) -> np.ndarray:
    """RGB palette; row 0 (empty) is black."""
    rng = np.random.default_rng(seed)
    colors = rng.integers(64, 256, size=(n + 1, 3), dtype=np.uint8)
    colors[0] = 0
    return colors


def write_cluster_ppm(labels: ClusterLabels, path: str | Path, present: np.ndarray | None = None) -> None:
    """Colour image of clusters; absent sites grey when ``present`` is given."""
    rgb = cluster_colors(labels.n_clusters)[labels.label]
    if present is not None:
        rgb[~np.asarray(present, dtype=bool)] = 40
    h, w = labels.label.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())
