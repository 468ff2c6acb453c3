"""
Sierpinski-carpet site lattices.

A carpet of stage ``N`` is a ``b**N x b**N`` grid of unit cells obtained by
substituting a ``b x b`` generator pattern into itself ``N`` times.  The site
lattice consists of the ``(b**N + 1)**2`` cell corners; a site is present when
it is a corner of at least one occupied cell, so only corners strictly inside
a cutout are missing.

Two independent builders are provided:

build_carpet_recursive
    Kronecker substitution of the generator followed by vertex extraction.
    Serves as the reference.
build_carpet_tdm
    Translational-dilation construction: a 2x2 seed block is copied
    downward, then to the right, then downward again inside the cutout band,
    once per stage.

External coordinates are 1-indexed ``(I, J)`` = (row, column); arrays are
0-indexed internally.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LatticeSizeError, ParameterError

#: Largest allowed ``b**N``; guards against accidental huge allocations.
MAX_CELLS_PER_SIDE = 10_000


class Family(str, enum.Enum):
    CENTRAL = "central"
    SCATTERED = "scattered"


@dataclass(frozen=True)
class CarpetSpec:
    """Parameters of an ``N``-stage carpet.

    ``l = 0`` is the degenerate full square lattice and is accepted for any
    ``b >= 2`` and either family.
    """

    b: int
    l: int
    family: Family = Family.CENTRAL
    N: int = 1

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        validate(self.b, self.l, self.family)
        if self.N < 1:
            raise ParameterError(f"stage count N must be >= 1, got {self.N}")

    @property
    def cells_per_side(self) -> int:
        return self.b**self.N

    @property
    def side_sites(self) -> int:
        return self.b**self.N + 1

    def label(self) -> str:
        return f"b{self.b}_l{self.l}_{self.family.value}_N{self.N}"


def validate(b: int, l: int, family: Family | str) -> None:
    family = Family(family)
    if b < 2:
        raise ParameterError(f"b must be >= 2, got {b}")
    if l < 0:
        raise ParameterError(f"l must be >= 0, got {l}")
    if l == 0:
        return
    if b < 3:
        raise ParameterError(f"b must be >= 3 when l > 0, got {b}")
    if family is Family.CENTRAL:
        if l >= b:
            raise ParameterError(f"central family requires b > l, got b={b}, l={l}")
        if (b - l) % 2:
            raise ParameterError(
                f"central family requires b - l even so the cutout is centered, got b={b}, l={l}"
            )
    elif b != 2 * l + 1:
        raise ParameterError(f"scattered family requires b = 2l + 1, got b={b}, l={l}")


@dataclass(frozen=True)
class CellPattern:
    """Generator pattern: a ``side x side`` grid with ``removed`` cells (1-indexed)."""

    side: int
    removed: frozenset

    def as_array(self) -> np.ndarray:
        cells = np.ones((self.side, self.side), dtype=bool)
        for r, c in self.removed:
            cells[r - 1, c - 1] = False
        return cells


def base_pattern(b: int, l: int, family: Family | str) -> CellPattern:
    family = Family(family)
    validate(b, l, family)
    if l == 0:
        removed = frozenset()
    elif family is Family.CENTRAL:
        lo = (b - l) // 2 + 1
        block = range(lo, lo + l)
        removed = frozenset((r, c) for r in block for c in block)
    else:
        evens = range(2, b + 1, 2)
        removed = frozenset((r, c) for r in evens for c in evens)
    return CellPattern(side=b, removed=removed)


@dataclass(frozen=True, eq=False)
class SiteLattice:
    spec: CarpetSpec
    present: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.present.setflags(write=False)

    @property
    def side_sites(self) -> int:
        return self.present.shape[0]

    @property
    def n_present(self) -> int:
        return int(self.present.sum())

    def __eq__(self, other):
        if not isinstance(other, SiteLattice):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.present, other.present)

    __hash__ = None


def _check_size(spec: CarpetSpec, max_cells: int) -> None:
    if spec.cells_per_side > max_cells:
        raise LatticeSizeError(
            f"b**N = {spec.cells_per_side} exceeds the limit of {max_cells} cells per side"
        )


def carpet_cells(spec: CarpetSpec, max_cells: int = MAX_CELLS_PER_SIDE) -> np.ndarray:
    """Cell occupancy of the stage-``N`` carpet, shape ``(b**N, b**N)``."""
    _check_size(spec, max_cells)
    pattern = base_pattern(spec.b, spec.l, spec.family).as_array()
    cells = np.ones((1, 1), dtype=bool)
    for _ in range(spec.N):
        cells = np.kron(cells, pattern).astype(bool)
    return cells


def sites_from_cells(cells: np.ndarray) -> np.ndarray:
    """Sites that are a corner of at least one occupied cell."""
    padded = np.pad(cells, 1, constant_values=False)
    return padded[:-1, :-1] | padded[:-1, 1:] | padded[1:, :-1] | padded[1:, 1:]


def build_carpet_recursive(spec: CarpetSpec, max_cells: int = MAX_CELLS_PER_SIDE) -> SiteLattice:
    return SiteLattice(spec, sites_from_cells(carpet_cells(spec, max_cells)))


def _down(M, rows, cols, B):
    """M(I, J) = M(I - B, J) for I ascending over ``rows`` (1-indexed, inclusive)."""
    lo, hi = rows
    c0, c1 = cols
    if lo > hi or c0 > c1:
        return
    for I in range(lo, hi + 1):
        M[I - 1, c0 - 1:c1] = M[I - 1 - B, c0 - 1:c1]


def _right(M, rows, cols, B):
    """M(I, J) = M(I, J - B) for J ascending over ``cols``."""
    lo, hi = rows
    c0, c1 = cols
    if lo > hi or c0 > c1:
        return
    for J in range(c0, c1 + 1):
        M[lo - 1:hi, J - 1] = M[lo - 1:hi, J - 1 - B]


def build_carpet_tdm(
    spec: CarpetSpec,
    max_cells: int = MAX_CELLS_PER_SIDE,
    printed_bounds: bool = False,
) -> SiteLattice:
    """Translational-dilation construction.

    With ``printed_bounds=True`` the central-family index ranges are taken
    literally as originally published: the lower rightward-translation band
    starts at ``(b + l) * B + 1`` (no halving) and the in-band downward
    translation is skipped at the first stage.  Those ranges leave parts of
    the lattice unfilled; the option exists only to document the difference.
    """
    _check_size(spec, max_cells)
    b, l, n_stages = spec.b, spec.l, spec.N
    side = b**n_stages + 1
    M = np.zeros((side, side), dtype=bool)
    M[0:2, 0:2] = True

    for n in range(1, n_stages + 1):
        B = b ** (n - 1)
        end = b**n + 1
        for T in range(1, b):
            _down(M, (T * B + 2, (T + 1) * B + 1), (1, B + 1), B)

        if l == 0:
            _right(M, (1, end), (B + 2, end), B)
            continue

        if spec.family is Family.CENTRAL:
            top = (b - l) * B // 2 + 1
            bottom = (b + l) * B // 2 + 1
            if printed_bounds:
                bottom = (b + l) * B + 1
            _right(M, (1, top), (B + 2, end), B)
            _right(M, (bottom, end), (B + 2, end), B)
            if printed_bounds and n == 1:
                continue
            band = ((b - l) * B // 2 + 2, (b + l) * B // 2)
            _down(M, band, (B + 2, (b - l) * B // 2 + 1), B)
            _down(M, band, ((b + l) * B // 2 + 1, end), B)
        else:
            for T in range(1, b + 1, 2):
                _right(M, ((T - 1) * B + 1, T * B + 1), (B + 2, end), B)
            for T in range(2, b, 2):
                band = ((T - 1) * B + 2, T * B)
                for Tp in range(0, b, 2):
                    _down(M, band, (Tp * B + 1, (Tp + 1) * B + 1), B)

    return SiteLattice(spec, M)


def build_carpet(spec: CarpetSpec, max_cells: int = MAX_CELLS_PER_SIDE) -> SiteLattice:
    return build_carpet_tdm(spec, max_cells)


# -- export ---------------------------------------------------------------


def write_pgm(mask: np.ndarray, path: str | Path) -> None:
    """Binary graymap, one pixel per site, True -> white."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.where(mask, 255, 0).astype(np.uint8).tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary graymap")
    w, h = int(parts[1]), int(parts[2])
    pixels = np.frombuffer(parts[4][: w * h], dtype=np.uint8)
    return pixels.reshape(h, w) > 0


def format_mask(mask: np.ndarray, spec: CarpetSpec) -> str:
    lines = [f"{spec.b} {spec.l} {spec.family.value} {spec.N}"]
    lines.extend("".join("1" if v else "0" for v in row) for row in np.asarray(mask, dtype=bool))
    return "\n".join(lines) + "\n"


def write_mask(mask: np.ndarray, spec: CarpetSpec, path: str | Path) -> None:
    Path(path).write_text(format_mask(mask, spec))


def read_mask(path: str | Path) -> tuple[CarpetSpec, np.ndarray]:
    lines = Path(path).read_text().split()
    try:
        b, l, family, n = lines[:4]
        spec = CarpetSpec(int(b), int(l), Family(family), int(n))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: bad mask header") from exc
    rows = lines[4:]
    mask = np.array([[ch == "1" for ch in row] for row in rows], dtype=bool)
    if mask.shape != (spec.side_sites, spec.side_sites):
        raise ValueError(f"{path}: expected {spec.side_sites} rows of {spec.side_sites} sites")
    return spec, mask
