"""Cubical grids and mod-2 chains on their skeleta.

A grid cell of dimension k is identified by an integer base corner and the
set of axes it extends along; chains are finite cell sets with symmetric
difference as addition.  All world coordinates are exact rationals derived
from the grid origin and spacing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .geom import Point

AXIS_NAMES = "xyz"


@dataclass(frozen=True, order=True)
class GridCell:
    """k-cell: base corner (lattice coords) plus the axes it spans."""

    base: tuple[int, int, int]
    axes: tuple[int, ...]  # strictly increasing subset of (0, 1, 2)

    def __post_init__(self):
        if tuple(sorted(set(self.axes))) != self.axes:
            raise ValueError(f"axes must be strictly increasing: {self.axes}")
        if any(a not in (0, 1, 2) for a in self.axes):
            raise ValueError(f"axes out of range: {self.axes}")

    @property
    def dim(self) -> int:
        return len(self.axes)

    def axes_label(self) -> str:
        return "".join(AXIS_NAMES[a] for a in self.axes)

    def facets(self) -> Iterator["GridCell"]:
        """The 2k boundary facets."""
        for a in self.axes:
            rest = tuple(x for x in self.axes if x != a)
            yield GridCell(self.base, rest)
            shifted = list(self.base)
            shifted[a] += 1
            yield GridCell(tuple(shifted), rest)

    def corners(self) -> Iterator[tuple[int, int, int]]:
        for picks in itertools.product(*[(0, 1) if a in self.axes else (0,) for a in (0, 1, 2)]):
            yield tuple(b + p for b, p in zip(self.base, picks))


def cell_from_label(base, axes_label: str) -> GridCell:
    axes = tuple(sorted(AXIS_NAMES.index(ch) for ch in axes_label))
    return GridCell(tuple(int(b) for b in base), axes)


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid: spacing epsilon, world origin, cell counts per axis."""

    epsilon: Fraction
    origin: Point
    dims: tuple[int, int, int]

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if any(d < 0 for d in self.dims):
            raise ValueError("dims must be nonnegative")

    def contains_cell(self, cell: GridCell) -> bool:
        for a in (0, 1, 2):
            extent = 1 if a in cell.axes else 0
            if cell.base[a] < 0 or cell.base[a] + extent > self.dims[a]:
                return False
        return True

    def world(self, lattice: tuple[int, int, int]) -> Point:
        return (
            self.origin[0] + self.epsilon * lattice[0],
            self.origin[1] + self.epsilon * lattice[1],
            self.origin[2] + self.epsilon * lattice[2],
        )

    def cells(self, k: int) -> Iterator[GridCell]:
        """All k-cells of the grid, in canonical order."""
        for axes in itertools.combinations((0, 1, 2), k):
            ranges = []
            for a in (0, 1, 2):
                top = self.dims[a] if a in axes else self.dims[a] + 1
                ranges.append(range(top))
            for base in itertools.product(*ranges):
                yield GridCell(base, axes)

    def cell_mass(self, k: int) -> Fraction:
        return self.epsilon ** k

    def box(self) -> tuple[Point, Point]:
        lo = self.origin
        hi = self.world(self.dims)
        return lo, hi


@dataclass(frozen=True)
class GridChain:
    """Mod-2 chain on the k-skeleton: a finite set of k-cells."""

    grid: GridSpec
    k: int
    cells: frozenset[GridCell]

    def __post_init__(self):
        if not -1 <= self.k <= 3:
            raise ValueError(f"chain dimension out of range: {self.k}")
        if self.k == -1 and self.cells:
            raise ValueError("(-1)-chains are identically empty")
        for c in self.cells:
            if c.dim != self.k:
                raise ValueError(f"cell dimension {c.dim} != chain dimension {self.k}")
            if not self.grid.contains_cell(c):
                raise ValueError(f"cell outside grid: {c}")

    def __add__(self, other: "GridChain") -> "GridChain":
        if self.grid != other.grid or self.k != other.k:
            raise ValueError("chain addition requires matching grid and dimension")
        return GridChain(self.grid, self.k, self.cells ^ other.cells)

    def is_zero(self) -> bool:
        return not self.cells

    def sorted_cells(self) -> list[GridCell]:
        return sorted(self.cells)

    def __len__(self):
        return len(self.cells)


def empty_chain(grid: GridSpec, k: int) -> GridChain:
    return GridChain(grid, k, frozenset())


def chain_of(grid: GridSpec, k: int, cells: Iterable[GridCell]) -> GridChain:
    acc: set[GridCell] = set()
    for c in cells:
        acc ^= {c}
    return GridChain(grid, k, frozenset(acc))


def boundary_grid(chain: GridChain) -> GridChain:
    """Mod-2 boundary; facets shared by an even number of cells cancel."""
    if chain.k == 0:
        raise ValueError("boundary undefined for 0-chains")
    acc: set[GridCell] = set()
    for cell in chain.cells:
        for f in cell.facets():
            acc ^= {f}
    return GridChain(chain.grid, chain.k - 1, frozenset(acc))


def mass_grid(chain: GridChain) -> Fraction:
    if chain.k < 0:
        return Fraction(0)
    return len(chain.cells) * chain.grid.cell_mass(chain.k)


def support_grid(chain: GridChain) -> list[GridCell]:
    """Minimal closed carrier, reported as the sorted cell list."""
    return chain.sorted_cells()


@dataclass(frozen=True)
class BoxRegion:
    """Closed axis box given by lattice corners of a grid."""

    lo: tuple[int, int, int]
    hi: tuple[int, int, int]

    def __post_init__(self):
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box corners out of order")

    def contains_cell(self, cell: GridCell) -> bool:
        for a in (0, 1, 2):
            extent = 1 if a in cell.axes else 0
            if cell.base[a] < self.lo[a] or cell.base[a] + extent > self.hi[a]:
                return False
        return True

    def world_box(self, grid: GridSpec) -> tuple[Point, Point]:
        return grid.world(self.lo), grid.world(self.hi)


def restrict_grid(chain: GridChain, box: BoxRegion) -> tuple[GridChain, GridChain]:
    """Split a chain into (inside, outside) parts along an aligned box.

    Cells lying inside the closed box (including its frontier, which is a
    union of lower-dimensional grid faces and carries no k-cell interior)
    go to the inside part; the two parts partition the chain exactly.
    """
    inside = frozenset(c for c in chain.cells if box.contains_cell(c))
    outside = chain.cells - inside
    return (
        GridChain(chain.grid, chain.k, inside),
        GridChain(chain.grid, chain.k, outside),
    )


def aligned_box_from_world(grid: GridSpec, lo: Point, hi: Point) -> BoxRegion:
    """Convert world coordinates to a lattice box; non-aligned input errors."""
    lat = []
    for corner in (lo, hi):
        out = []
        for a in (0, 1, 2):
            t = (Fraction(corner[a]) - grid.origin[a]) / grid.epsilon
            if t.denominator != 1:
                raise ValueError(f"box corner not grid-aligned: {corner}")
            out.append(int(t))
        lat.append(tuple(out))
    return BoxRegion(lat[0], lat[1])


def refine_grid_chain(chain: GridChain, factor: int) -> GridChain:
    """Re-express a chain on the factor-refined grid (same geometric support)."""
    if factor < 1:
        raise ValueError("refinement factor must be >= 1")
    g = chain.grid
    fine = GridSpec(g.epsilon / factor, g.origin, tuple(d * factor for d in g.dims))
    cells = []
    for cell in chain.cells:
        offsets = [range(factor) if a in cell.axes else (0,) for a in (0, 1, 2)]
        for off in itertools.product(*offsets):
            base = tuple(cell.base[a] * factor + off[a] for a in (0, 1, 2))
            cells.append(GridCell(base, cell.axes))
    return GridChain(fine, chain.k, frozenset(cells))
