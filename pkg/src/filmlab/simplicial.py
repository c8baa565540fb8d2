"""Mod-2 simplicial chains with exact rational vertices.

A chain is a finite set of canonical simplices (vertex tuples in sorted
order); mod-2 addition is symmetric difference after canonicalization, and
zero-measure simplices are dropped on construction.  Presentation-level
equality is coarser than geometric equality of chains; the overlay module
decides the latter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import RadicalSum, is_psd, mat_vec, radical_sum
from .geom import (
    Plane,
    Point,
    Simplex,
    as_point,
    centroid,
    is_degenerate,
    simplex_measure,
    split_simplex,
    sup_norm,
    vdot,
    vscale,
    vsub,
)
from .grid import GridChain


def canonical_simplex(vertices: Sequence[Sequence]) -> Simplex:
    pts = tuple(sorted(as_point(v) for v in vertices))
    return pts


@dataclass(frozen=True)
class SimplicialChain:
    """k-chain over Z/2: canonical simplices with multiplicity-parity one."""

    k: int
    simplices: frozenset[Simplex]

    def __post_init__(self):
        if not -1 <= self.k <= 3:
            raise ValueError(f"chain dimension out of range: {self.k}")
        if self.k == -1 and self.simplices:
            raise ValueError("(-1)-chains are identically empty")
        for s in self.simplices:
            if len(s) != self.k + 1:
                raise ValueError("simplex arity does not match chain dimension")

    def __add__(self, other: "SimplicialChain") -> "SimplicialChain":
        if self.k != other.k:
            raise ValueError("chain addition requires equal dimension")
        return SimplicialChain(self.k, self.simplices ^ other.simplices)

    def is_zero_presentation(self) -> bool:
        return not self.simplices

    def sorted_simplices(self) -> list[Simplex]:
        return sorted(self.simplices)

    def vertices(self) -> list[Point]:
        seen = set()
        for s in self.simplices:
            seen.update(s)
        return sorted(seen)

    def __len__(self):
        return len(self.simplices)


def simplicial_chain(k: int, simplices: Iterable[Sequence[Sequence]]) -> SimplicialChain:
    """Canonicalize, drop degenerate simplices, cancel mod-2 duplicates."""
    acc: set[Simplex] = set()
    for raw in simplices:
        s = canonical_simplex(raw)
        if len(s) != k + 1:
            raise ValueError("simplex arity does not match chain dimension")
        if len(set(s)) != len(s) or (k > 0 and is_degenerate(s)):
            continue
        acc ^= {s}
    return SimplicialChain(k, frozenset(acc))


def empty_simplicial(k: int) -> SimplicialChain:
    return SimplicialChain(k, frozenset())


def mass_simplicial(chain: SimplicialChain) -> RadicalSum:
    """Sum of simplex measures over the stored presentation."""
    return radical_sum(simplex_measure(s) for s in chain.simplices)


def boundary_simplicial(chain: SimplicialChain) -> SimplicialChain:
    """Mod-2 boundary; coincident facets cancel at the presentation level."""
    if chain.k == 0:
        raise ValueError("boundary undefined for 0-chains")
    acc: set[Simplex] = set()
    for s in chain.simplices:
        for i in range(len(s)):
            facet = s[:i] + s[i + 1 :]
            if chain.k - 1 > 0 and is_degenerate(facet):
                continue
            acc ^= {facet}
    return SimplicialChain(chain.k - 1, frozenset(acc))


def cone(apex: Sequence, chain: SimplicialChain) -> SimplicialChain:
    """Cone over a chain: apex joined to every simplex, degenerates dropped."""
    if chain.k >= 3:
        raise ValueError("cone would exceed ambient dimension")
    p = as_point(apex)
    return simplicial_chain(chain.k + 1, [s + (p,) for s in chain.simplices])


# -- piecewise-linear maps --------------------------------------------------


@dataclass(frozen=True)
class PLMap:
    """A piecewise-linear map with a declared Lipschitz bound.

    Either an affine map x -> matrix x + offset, or a vertex relocation
    table for chains whose vertices are all listed.  The declared constant
    must have a rational square; it is verified against the true stretch on
    every simplex the map is applied to.
    """

    lipschitz: RadicalSum
    matrix: tuple[tuple[Fraction, ...], ...] | None = None
    offset: Point | None = None
    table: Mapping[Point, Point] | None = None

    @staticmethod
    def affine(matrix, offset, lipschitz) -> "PLMap":
        m = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        lip = lipschitz if isinstance(lipschitz, RadicalSum) else RadicalSum.from_fraction(lipschitz)
        return PLMap(lipschitz=lip, matrix=m, offset=as_point(offset))

    @staticmethod
    def relocation(table: Mapping, lipschitz) -> "PLMap":
        t = {as_point(k): as_point(v) for k, v in table.items()}
        lip = lipschitz if isinstance(lipschitz, RadicalSum) else RadicalSum.from_fraction(lipschitz)
        return PLMap(lipschitz=lip, table=t)

    def apply_point(self, p: Point) -> Point:
        if self.matrix is not None:
            img = mat_vec(self.matrix, p)
            return (img[0] + self.offset[0], img[1] + self.offset[1], img[2] + self.offset[2])
        if p not in self.table:
            raise ValueError(f"vertex not in relocation table: {p}")
        return self.table[p]

    def lipschitz_sq(self) -> Fraction:
        return (self.lipschitz * self.lipschitz).as_fraction()


class LipschitzViolation(ValueError):
    """Declared Lipschitz constant smaller than the stretch on some simplex."""


def _check_stretch(pre: Simplex, post: Simplex, lip_sq: Fraction) -> bool:
    """L^2 Gram(pre) - Gram(post) must be PSD on the simplex direction space."""
    k = len(pre) - 1
    if k == 0:
        return True
    g_pre = [vsub(v, pre[0]) for v in pre[1:]]
    g_post = [vsub(v, post[0]) for v in post[1:]]
    m = [
        [lip_sq * vdot(g_pre[i], g_pre[j]) - vdot(g_post[i], g_post[j]) for j in range(k)]
        for i in range(k)
    ]
    return is_psd(m)


def pushforward(f: PLMap, chain: SimplicialChain) -> SimplicialChain:
    """Image chain; errors if any simplex stretches beyond the declared bound.

    The image of a simplex under an affine or vertex-relocation map is the
    simplex on the image vertices; degenerate images vanish mod 2.
    """
    lip_sq = f.lipschitz_sq()
    images = []
    for s in sorted(chain.simplices):
        img = tuple(f.apply_point(v) for v in s)
        if not _check_stretch(s, img, lip_sq):
            raise LipschitzViolation(
                f"stretch on simplex {s} exceeds declared Lipschitz constant"
            )
        images.append(img)
    return simplicial_chain(chain.k, images)


# -- cube clamp -------------------------------------------------------------

_DIAGONAL_PLANES = [
    Plane((1, -1, 0), Fraction(0)),
    Plane((1, 1, 0), Fraction(0)),
    Plane((1, 0, -1), Fraction(0)),
    Plane((1, 0, 1), Fraction(0)),
    Plane((0, 1, -1), Fraction(0)),
    Plane((0, 1, 1), Fraction(0)),
]


def _clamp_point(p: Point, r: Fraction) -> Point:
    s = sup_norm(p)
    if s <= r:
        return p
    return vscale(r / s, p)


def clamp_to_cube(chain: SimplicialChain, r) -> SimplicialChain:
    """Clamp onto the cube {sup-norm <= r}: identity inside, radial rescale
    along the sup-norm outside.  1-Lipschitz, so mass never increases.

    Simplices are split by the six cube face planes and the six diagonal
    planes through the origin and cube edges; on each resulting region the
    map is projective, so straight pieces map to straight pieces.
    """
    r = Fraction(r)
    if r <= 0:
        raise ValueError("clamp radius must be positive")
    if chain.k == 0:
        return simplicial_chain(0, [(_clamp_point(s[0], r),) for s in chain.simplices])
    face_planes = [Plane(n, r) for n in ((1, 0, 0), (0, 1, 0), (0, 0, 1))] + [
        Plane(n, -r) for n in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    ]
    out = []
    for s in sorted(chain.simplices):
        pieces = [s]
        for plane in face_planes + _DIAGONAL_PLANES:
            nxt = []
            for piece in pieces:
                neg, on, pos = split_simplex(piece, plane)
                nxt.extend(neg)
                nxt.extend(on)
                nxt.extend(pos)
            pieces = nxt
        for piece in pieces:
            if all(sup_norm(v) <= r for v in piece):
                out.append(piece)
                continue
            c = centroid(piece)
            axis = max(range(3), key=lambda a: abs(c[a]))
            # all vertices of an outside piece satisfy |v_axis| >= r > 0
            out.append(tuple(vscale(r / abs(v[axis]), v) for v in piece))
    return simplicial_chain(chain.k, out)


# -- restriction ------------------------------------------------------------


def restrict_simplicial(
    chain: SimplicialChain, lo: Sequence, hi: Sequence
) -> tuple[SimplicialChain, SimplicialChain]:
    """Exact polyhedral clip against a closed box.

    Returns (inside, outside).  Pieces contained in the box frontier are
    assigned to the inside part, so the two parts partition the chain and
    masses add exactly.
    """
    lo = as_point(lo)
    hi = as_point(hi)
    if chain.k == 0:
        inside, outside = [], []
        for s in chain.simplices:
            p = s[0]
            if all(lo[a] <= p[a] <= hi[a] for a in range(3)):
                inside.append(s)
            else:
                outside.append(s)
        return simplicial_chain(0, inside), simplicial_chain(0, outside)
    planes = []
    for a, n in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
        planes.append(Plane(n, lo[a]))
        planes.append(Plane(n, hi[a]))
    ins, outs = [], []
    for s in sorted(chain.simplices):
        pieces = [s]
        for plane in planes:
            nxt = []
            for piece in pieces:
                neg, on, pos = split_simplex(piece, plane)
                nxt.extend(neg)
                nxt.extend(on)
                nxt.extend(pos)
            pieces = nxt
        for piece in pieces:
            if all(lo[a] <= v[a] <= hi[a] for v in piece for a in range(3)):
                ins.append(piece)
            else:
                outs.append(piece)
    return simplicial_chain(chain.k, ins), simplicial_chain(chain.k, outs)


# -- grid embedding ---------------------------------------------------------


def embed_grid_chain(chain: GridChain) -> SimplicialChain:
    """Deterministic simplicial presentation of a grid chain (k <= 2).

    Vertices map to points, edges to segments, and each square face to two
    triangles split along the base-to-opposite diagonal.
    """
    g = chain.grid
    if chain.k > 2:
        raise ValueError("grid embedding supports k <= 2")
    if chain.k <= 0:
        return SimplicialChain(
            chain.k, frozenset((g.world(c.base),) for c in chain.cells)
        )
    out = []
    for cell in chain.sorted_cells():
        if chain.k == 1:
            a = cell.axes[0]
            far = list(cell.base)
            far[a] += 1
            out.append((g.world(cell.base), g.world(tuple(far))))
        else:
            a, b = cell.axes
            c00 = list(cell.base)
            c10 = list(cell.base)
            c10[a] += 1
            c01 = list(cell.base)
            c01[b] += 1
            c11 = list(c10)
            c11[b] += 1
            p00, p10, p01, p11 = (
                g.world(tuple(c00)),
                g.world(tuple(c10)),
                g.world(tuple(c01)),
                g.world(tuple(c11)),
            )
            out.append((p00, p10, p11))
            out.append((p00, p11, p01))
    return simplicial_chain(chain.k, out)
