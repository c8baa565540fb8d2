#!/usr/bin/env python3
"""Regenerate the JSON fixtures under fixtures/.

All fixtures are exact-rational and deterministic; run from the
repository root after changing the schema.
"""

import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from filmlab.dipolyhedra import Dipolyhedron, cone_dip
from filmlab.grid import GridCell, GridSpec, chain_of, empty_chain
from filmlab.io_formats import dumps_report
from filmlab.simplicial import simplicial_chain

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def square_curve(grid, z, lo, hi):
    cells = []
    for i in range(lo, hi):
        cells += [
            GridCell((i, lo, z), (0,)),
            GridCell((i, hi, z), (0,)),
            GridCell((lo, i, z), (1,)),
            GridCell((hi, i, z), (1,)),
        ]
    return chain_of(grid, 1, cells)


def write(name, obj):
    path = os.path.join(OUT, name)
    with open(path, "w") as fh:
        fh.write(dumps_report(obj))
    print(f"wrote {path}")


def main():
    os.makedirs(OUT, exist_ok=True)

    # 4-edge unit square boundary on a 2x2x1 grid; flat norm 1 at eps = 1
    g_small = GridSpec(origin=(Fraction(0), Fraction(0), Fraction(0)), epsilon=Fraction(1), dims=(2, 2, 1))
    write("square.json", square_curve(g_small, 0, 0, 1))

    # centred unit square on a grid covering its working cube; least weight 1
    g_unit = GridSpec(
        origin=(Fraction(-3, 2), Fraction(-3, 2), Fraction(-1)), epsilon=Fraction(1), dims=(3, 3, 2)
    )
    unit_curve = square_curve(g_unit, 1, 1, 2)
    write("square_curve.json", unit_curve)

    # centred 2x2 square on a 4x4x4 grid; least weight 4
    g_patch = GridSpec(origin=(Fraction(-2), Fraction(-2), Fraction(-2)), epsilon=Fraction(1), dims=(4, 4, 4))
    write("patch2x2.json", square_curve(g_patch, 2, 1, 3))

    # one tilted triangle, exact rational vertices
    tri = simplicial_chain(
        2,
        [[(0, 0, 0), (1, 0, Fraction(1, 3)), (Fraction(1, 4), 1, Fraction(1, 2))]],
    )
    write("tilted_triangle.json", tri)

    # cone pair over the centred unit square from the origin
    curve_pair = Dipolyhedron(unit_curve, empty_chain(g_unit, 0))
    write("cone.json", cone_dip((0, 0, 0), curve_pair))

    # empty 1-chain on the small grid
    write("empty_curve.json", empty_chain(g_small, 1))


if __name__ == "__main__":
    main()
