"""Shared builders for grids, curves, and seeded random chains."""

import random
from fractions import Fraction

import pytest

from filmlab.grid import GridCell, GridSpec, chain_of
from filmlab.simplicial import simplicial_chain


def make_grid(dims, origin=(0, 0, 0), eps=1):
    return GridSpec(
        origin=tuple(Fraction(o) for o in origin),
        epsilon=Fraction(eps),
        dims=tuple(dims),
    )


def square_curve(grid, z, lo, hi):
    """Boundary of the lattice square [lo,hi]^2 at height index z."""
    cells = []
    for i in range(lo, hi):
        cells += [
            GridCell((i, lo, z), (0,)),
            GridCell((i, hi, z), (0,)),
            GridCell((lo, i, z), (1,)),
            GridCell((hi, i, z), (1,)),
        ]
    return chain_of(grid, 1, cells)


def random_grid_chain(grid, k, rng, density=0.3):
    cells = [c for c in grid.cells(k) if rng.random() < density]
    return chain_of(grid, k, cells)


def rational(rng, span=2, den=4):
    return Fraction(rng.randint(-span * den, span * den), den)


def random_point(rng, span=2, den=4):
    return tuple(rational(rng, span, den) for _ in range(3))


def random_simplicial_chain(k, rng, count=3, span=2, den=4):
    """Nonempty by retry; degenerate simplices vanish on construction."""
    for _ in range(32):
        simplices = [
            [random_point(rng, span, den) for _ in range(k + 1)] for _ in range(count)
        ]
        chain = simplicial_chain(k, simplices)
        if chain.simplices:
            return chain
    raise AssertionError("could not build a nonempty random chain")


@pytest.fixture
def rng():
    return random.Random("filmlab-tests")
