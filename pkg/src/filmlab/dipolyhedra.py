"""Film/mass pairs and the spanning test.

A k-dipolyhedron bundles a k-chain B (the film part, charged by weight)
with a (k-1)-chain C (the mass part) over a single representation, grid
or simplicial.  Energy charges both parts.  The boundary mixes them,

    boundary(B, C) = (boundary(B) + C, boundary(C)),

which squares to zero mod 2.  Cone, pushforward, clamp and restriction
act componentwise.

Spanning a closed curve gamma is decided by shadows: the pair spans when
its film projects, with mod-2 multiplicity, exactly onto the region
bounded by the projected curve, for every admissible projection
direction.  Equality of a projected film with that region is decided by
a jump-set argument: the coverage-parity function of the projected film
plus the region is piecewise constant, vanishes far away, and can only
jump across projected film edges or projected curve segments.  It is
therefore zero almost everywhere iff those segments cancel mod 2 in the
one-dimensional interval-parity overlay.  Degenerate (edge-on) images
cancel automatically, so no direction needs special casing.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .exact import RadicalSum
from .geom import (
    Point,
    Point2,
    as_point,
    primitive_direction,
    shoelace_twice,
    sup_norm,
    vcross,
    vdot,
    vnorm_sq,
    vsub,
)
from .grid import BoxRegion, GridChain, GridSpec, empty_chain, boundary_grid, mass_grid, restrict_grid
from .overlay import chains_equal_mod2, is_zero_geometric, overlay_leftover
from .simplicial import (
    PLMap,
    SimplicialChain,
    boundary_simplicial,
    clamp_to_cube,
    cone,
    embed_grid_chain,
    empty_simplicial,
    mass_simplicial,
    pushforward,
    restrict_simplicial,
    simplicial_chain,
)

Chain = Union[GridChain, SimplicialChain]


# ---------------------------------------------------------------------------
# representation-generic chain helpers

def is_grid_chain(chain: Chain) -> bool:
    return isinstance(chain, GridChain)


def chain_mass(chain: Chain):
    """Mass of either representation: Fraction for grid, RadicalSum else."""
    if is_grid_chain(chain):
        return mass_grid(chain)
    return mass_simplicial(chain)


def chain_boundary(chain: Chain) -> Chain:
    # 0-chains have the empty (-1)-chain as boundary; the per-rep boundary
    # operators refuse k = 0, so handle that rung here.
    if chain.k == 0:
        if is_grid_chain(chain):
            return empty_chain(chain.grid, -1)
        return empty_simplicial(-1)
    if is_grid_chain(chain):
        return boundary_grid(chain)
    return boundary_simplicial(chain)


def chain_is_zero(chain: Chain, mode: str = "exact") -> bool:
    """Mod-2 triviality; geometric (not presentational) for simplicial."""
    if is_grid_chain(chain):
        return chain.is_zero()
    if mode == "exact":
        return is_zero_geometric(chain)
    return chain.is_zero_presentation()


def _empty_like(chain: Chain, k: int) -> Chain:
    if is_grid_chain(chain):
        return empty_chain(chain.grid, k)
    return empty_simplicial(k)


# ---------------------------------------------------------------------------
# the pair type

@dataclass(frozen=True)
class Dipolyhedron:
    """Film part B (dimension k) and mass part C (dimension k-1)."""

    B: Chain
    C: Chain

    def __post_init__(self):
        if is_grid_chain(self.B) != is_grid_chain(self.C):
            raise ValueError("film and mass parts must share one representation")
        if is_grid_chain(self.B) and self.B.grid != self.C.grid:
            raise ValueError("film and mass parts must live on the same grid")
        if self.C.k != self.B.k - 1:
            raise ValueError(
                f"mass part must sit one dimension below the film: {self.C.k} != {self.B.k} - 1"
            )

    @property
    def k(self) -> int:
        return self.B.k

    @property
    def rep(self) -> str:
        return "grid" if is_grid_chain(self.B) else "simplicial"

    def __add__(self, other: "Dipolyhedron") -> "Dipolyhedron":
        return Dipolyhedron(self.B + other.B, self.C + other.C)


def make_dipole(B: Chain) -> Dipolyhedron:
    """Pure film pair (B, 0)."""
    return Dipolyhedron(B, _empty_like(B, B.k - 1))


def make_massive(C: Chain) -> Dipolyhedron:
    """Pure mass pair (0, C), one dimension above C."""
    if C.k >= 3:
        raise ValueError("mass part of dimension 3 would need a 4-dimensional film")
    return Dipolyhedron(_empty_like(C, C.k + 1), C)


class EnergySplit(tuple):
    """(energy, weight, mass_part) with named access."""

    __slots__ = ()

    def __new__(cls, energy, weight, mass_part):
        return tuple.__new__(cls, (energy, weight, mass_part))

    energy = property(lambda self: self[0])
    weight = property(lambda self: self[1])
    mass_part = property(lambda self: self[2])


def energy(A: Dipolyhedron) -> EnergySplit:
    """Energy = M(B) + M(C); weight charges the film only."""
    w = chain_mass(A.B)
    m = chain_mass(A.C)
    return EnergySplit(w + m, w, m)


def weight(A: Dipolyhedron):
    return chain_mass(A.B)


def boundary_dip(A: Dipolyhedron) -> Dipolyhedron:
    """(boundary(B) + C, boundary(C)), one dimension down."""
    if A.k < 1:
        raise ValueError("0-dimensional pairs have no boundary")
    return Dipolyhedron(chain_boundary(A.B) + A.C, chain_boundary(A.C))


def dip_equal(A: Dipolyhedron, other: Dipolyhedron, mode: str = "exact") -> bool:
    """Componentwise mod-2 equality (geometric for simplicial reps)."""
    if A.rep != other.rep or A.k != other.k:
        return False
    if A.rep == "grid":
        return A.B.cells == other.B.cells and A.C.cells == other.C.cells
    return bool(chains_equal_mod2(A.B, other.B, mode=mode)) and bool(
        chains_equal_mod2(A.C, other.C, mode=mode)
    )


def support_dip(A: Dipolyhedron) -> list:
    """Cells (grid) or simplices (simplicial) of both parts, sorted."""
    if A.rep == "grid":
        return sorted(A.B.cells | A.C.cells)
    return sorted(A.B.simplices | A.C.simplices)


def support_points(A: Dipolyhedron) -> list[Point]:
    """Every vertex (simplicial) or cell corner (grid) in the support."""
    pts = set()
    if A.rep == "grid":
        for cell in A.B.cells | A.C.cells:
            for corner in cell.corners():
                pts.add(A.B.grid.world(corner))
    else:
        for simplex in A.B.simplices | A.C.simplices:
            pts.update(simplex)
    return sorted(pts)


def support_in_cube(A: Dipolyhedron, center: Sequence, r) -> bool:
    """Support inside the axis cube of side r centered at the given point."""
    c = as_point(center)
    half = Fraction(r) / 2
    return all(sup_norm(vsub(p, c)) <= half for p in support_points(A))


# ---------------------------------------------------------------------------
# cone, pushforward, clamp, restriction

def to_simplicial(A: Dipolyhedron) -> Dipolyhedron:
    if A.rep == "simplicial":
        return A
    return Dipolyhedron(embed_grid_chain(A.B), embed_grid_chain(A.C))


def cone_dip(apex: Sequence, A: Dipolyhedron) -> Dipolyhedron:
    """Componentwise cone; grid pairs are embedded first."""
    S = to_simplicial(A)
    return Dipolyhedron(cone(apex, S.B), cone(apex, S.C))


def cone_identity_holds(apex: Sequence, A: Dipolyhedron, mode: str = "exact") -> bool:
    """A = boundary(cone(A)) + cone(boundary(A)), checked mod 2."""
    if not 1 <= A.k <= 2:
        raise ValueError("cone identity check needs film dimension 1 or 2")
    S = to_simplicial(A)
    recomposed = boundary_dip(cone_dip(apex, S)) + cone_dip(apex, boundary_dip(S))
    return dip_equal(recomposed, S, mode=mode)


@dataclass(frozen=True)
class ConeBound:
    """Cone energy against the cube bound factor r*sqrt(3)/(k+1)."""

    lhs: RadicalSum
    rhs: RadicalSum
    factor: RadicalSum
    holds: bool


def cone_energy_bound(apex: Sequence, A: Dipolyhedron, r) -> ConeBound:
    """E(cone) <= (r sqrt3 / (k+1)) E(A) when support(A) fits in Q(apex, r)."""
    if not support_in_cube(A, apex, r):
        raise ValueError("support must lie in the cube Q(apex, r)")
    S = to_simplicial(A)
    factor = RadicalSum.sqrt(3) * Fraction(Fraction(r), A.k + 1)
    lhs = energy(cone_dip(apex, S)).energy
    rhs = factor * energy(S).energy
    return ConeBound(lhs, rhs, factor, lhs <= rhs)


def pushforward_dip(f: PLMap, A: Dipolyhedron) -> Dipolyhedron:
    """Componentwise pushforward; grid pairs are embedded first."""
    S = to_simplicial(A)
    return Dipolyhedron(pushforward(f, S.B), pushforward(f, S.C))


def clamp_dip(r, A: Dipolyhedron) -> Dipolyhedron:
    """Componentwise clamp onto the cube of radius r about the origin."""
    S = to_simplicial(A)
    return Dipolyhedron(clamp_to_cube(S.B, r), clamp_to_cube(S.C, r))


@dataclass(frozen=True)
class MeasureReport:
    """Split of energy carried by a box: nu = omega (film) + mu (mass)."""

    box: object
    omega: object
    mu: object
    nu: object

    def __post_init__(self):
        if self.nu != self.omega + self.mu:
            raise ValueError("nu must equal omega + mu")


def restrict_dip(A: Dipolyhedron, box) -> tuple[Dipolyhedron, MeasureReport]:
    """Part of the pair inside a box, with its measure report.

    Grid pairs take a BoxRegion; simplicial pairs take world corners
    (lo, hi).  The outside part is A + inside, and energy is additive
    across the split.
    """
    if A.rep == "grid":
        if not isinstance(box, BoxRegion):
            raise ValueError("grid restriction needs a BoxRegion")
        b_in, _ = restrict_grid(A.B, box)
        c_in, _ = restrict_grid(A.C, box)
    else:
        lo, hi = box
        b_in, _ = restrict_simplicial(A.B, lo, hi)
        c_in, _ = restrict_simplicial(A.C, lo, hi)
    inside = Dipolyhedron(b_in, c_in)
    omega = chain_mass(b_in)
    mu = chain_mass(c_in)
    return inside, MeasureReport(box, omega, mu, omega + mu)


# ---------------------------------------------------------------------------
# projections

_AXIS_NAMES = "xyz"


@dataclass(frozen=True)
class ProjectionDir:
    """Orthogonal projection along `direction` onto its orthogonal plane.

    Plane points are reported in rational coordinates (s, t) over an
    orthogonal rational basis (u, v) of the plane; only areas pick up
    the irrational scale |u||v|.
    """

    direction: Point

    def __post_init__(self):
        if all(x == 0 for x in self.direction):
            raise ValueError("projection direction must be nonzero")

    @staticmethod
    def along_axis(axis: int) -> "ProjectionDir":
        d = [Fraction(0)] * 3
        d[axis] = Fraction(1)
        return ProjectionDir(as_point(d))

    @staticmethod
    def from_direction(v: Sequence) -> "ProjectionDir":
        return ProjectionDir(as_point(v))

    @property
    def axis(self) -> Optional[int]:
        live = [i for i in range(3) if self.direction[i] != 0]
        return live[0] if len(live) == 1 else None

    def plane_basis(self) -> tuple[Point, Point]:
        if self.axis is not None:
            j, l = [i for i in range(3) if i != self.axis]
            u = [Fraction(0)] * 3
            v = [Fraction(0)] * 3
            u[j] = Fraction(1)
            v[l] = Fraction(1)
            return as_point(u), as_point(v)
        d = self.direction
        if d[0] == 0 and d[1] == 0:
            u = as_point((1, 0, 0))
        else:
            u = as_point((-d[1], d[0], 0))
        return u, vcross(d, u)

    def project2(self, p: Sequence) -> Point2:
        u, v = self.plane_basis()
        q = as_point(p)
        return (vdot(q, u) / vnorm_sq(u), vdot(q, v) / vnorm_sq(v))

    def area_scale(self) -> RadicalSum:
        """True plane area per unit of (s, t) coordinate area."""
        u, v = self.plane_basis()
        return RadicalSum.sqrt(vnorm_sq(u) * vnorm_sq(v))

    def label(self) -> str:
        if self.axis is not None:
            return _AXIS_NAMES[self.axis]
        return "dir(" + ",".join(str(x) for x in self.direction) + ")"


def default_directions(seed: int = 0, extra: int = 10) -> list[ProjectionDir]:
    """The three axes plus seeded rational unit directions off the sphere."""
    dirs = [ProjectionDir.along_axis(i) for i in range(3)]
    rng = random.Random(f"filmlab-span:{seed}")
    seen = set()
    while len(dirs) < 3 + extra:
        u = Fraction(rng.randint(-7, 7), rng.randint(1, 7))
        v = Fraction(rng.randint(-7, 7), rng.randint(1, 7))
        if u == 0 and v == 0:
            continue
        w = 1 + u * u + v * v
        d = (2 * u / w, 2 * v / w, (1 - u * u - v * v) / w)
        key = primitive_direction(as_point(d))
        if key in seen:
            continue
        seen.add(key)
        dirs.append(ProjectionDir.from_direction(d))
    return dirs


# ---------------------------------------------------------------------------
# planar mod-2 chains and shadows

def _lift2(p: Point2) -> Point:
    return (p[0], p[1], Fraction(0))


def _overlay2(segments) -> tuple:
    """Canonical mod-2 reduction of plane segments (interval parity)."""
    lifted = [(_lift2(a), _lift2(b)) for a, b in segments]
    reduced = overlay_leftover(lifted)
    return tuple(sorted(((a[0], a[1]), (b[0], b[1])) for a, b in reduced))


def _point_in_triangle2(p: Point2, tri) -> str:
    def orient(a, b, c):
        d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return (d > 0) - (d < 0)

    a, b, c = tri
    s1, s2, s3 = orient(a, b, p), orient(b, c, p), orient(c, a, p)
    if s1 == s2 == s3 != 0:
        return "in"
    signs = {s1, s2, s3} - {0}
    if len(signs) <= 1:
        return "on"
    return "out"


@dataclass(frozen=True)
class PlanarChain:
    """Mod-2 chain in projection-plane coordinates.

    kind "cells": lattice squares of side epsilon anchored at origin
    (axis shadows of grid films).  kind "triangles": a presentation
    whose coverage parity is the chain (projected simplicial films);
    overlaps are resolved lazily by jump-set tests.  kind "segments":
    overlay-reduced plane segments (shadows of curves).
    """

    k: int
    kind: str
    cells: frozenset = frozenset()
    epsilon: Optional[Fraction] = None
    origin: Optional[Point2] = None
    segments: tuple = ()
    triangles: tuple = ()
    area_scale: RadicalSum = RadicalSum.from_fraction(1)

    def jump_segments(self) -> list:
        if self.kind == "triangles":
            out = []
            for tri in self.triangles:
                for i in range(3):
                    a, b = tri[i], tri[(i + 1) % 3]
                    if a != b:
                        out.append((a, b))
            return out
        if self.kind == "cells":
            out = []
            for cell in self.cells:
                sq = _cell_square(cell, self.epsilon, self.origin)
                for i in range(4):
                    out.append((sq[i], sq[(i + 1) % 4]))
            return out
        raise ValueError("jump segments are defined for 2-dimensional shadows")

    def is_empty(self) -> bool:
        if self.kind == "cells":
            return not self.cells
        if self.kind == "segments":
            return not self.segments
        return not _overlay2(self.jump_segments())

    def cell_area(self):
        if self.kind != "cells":
            raise ValueError("exact area is only tracked for cell shadows")
        return self.epsilon * self.epsilon * len(self.cells)

    def sampled_cells(self, epsilon, margin: int = 1) -> frozenset:
        """Coverage parity at reference-grid cell centers, exact tests.

        Centers on a triangle edge count as covered; the sample is an
        advisory picture, equality decisions go through jump sets.
        """
        if self.kind != "triangles":
            raise ValueError("sampling applies to triangle shadows")
        eps = Fraction(epsilon)
        pts = [p for tri in self.triangles for p in tri]
        if not pts:
            return frozenset()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        i_lo = int((min(xs) / eps).__floor__()) - margin
        i_hi = int((max(xs) / eps).__ceil__()) + margin
        j_lo = int((min(ys) / eps).__floor__()) - margin
        j_hi = int((max(ys) / eps).__ceil__()) + margin
        out = set()
        for i in range(i_lo, i_hi):
            for j in range(j_lo, j_hi):
                center = (eps * i + eps / 2, eps * j + eps / 2)
                parity = sum(
                    1 for tri in self.triangles if _point_in_triangle2(center, tri) != "out"
                )
                if parity % 2:
                    out.add((i, j))
        return frozenset(out)

    def as_simplicial_plane(self) -> SimplicialChain:
        """The shadow as a 3D chain in the z = 0 plane (for comparisons)."""
        if self.kind == "segments":
            return simplicial_chain(1, [(_lift2(a), _lift2(b)) for a, b in self.segments])
        if self.kind == "triangles":
            return simplicial_chain(2, [tuple(_lift2(p) for p in tri) for tri in self.triangles])
        tris = []
        for cell in self.cells:
            sq = _cell_square(cell, self.epsilon, self.origin)
            tris.append(tuple(_lift2(p) for p in (sq[0], sq[1], sq[2])))
            tris.append(tuple(_lift2(p) for p in (sq[0], sq[2], sq[3])))
        return simplicial_chain(2, tris)


def _cell_square(cell, epsilon, origin) -> list[Point2]:
    i, j = cell
    x = origin[0] + epsilon * i
    y = origin[1] + epsilon * j
    return [(x, y), (x + epsilon, y), (x + epsilon, y + epsilon), (x, y + epsilon)]


def _grid_face_corners(grid: GridSpec, cell) -> list[Point]:
    a1, a2 = cell.axes
    base = list(cell.base)
    cyc = []
    for da1, da2 in ((0, 0), (1, 0), (1, 1), (0, 1)):
        lat = list(base)
        lat[a1] += da1
        lat[a2] += da2
        cyc.append(grid.world(tuple(lat)))
    return cyc


def _grid_edge_ends(grid: GridSpec, cell) -> tuple[Point, Point]:
    (a,) = cell.axes
    lo = list(cell.base)
    hi = list(cell.base)
    hi[a] += 1
    return grid.world(tuple(lo)), grid.world(tuple(hi))


def shadow(chain: Chain, proj: ProjectionDir) -> PlanarChain:
    """Mod-2 projection of a 1- or 2-chain onto the target plane.

    Grid chains support axis directions only (embed to simplicial for
    oblique ones).  Edge-on cells and degenerate triangle images carry
    no area and are dropped.
    """
    if chain.k not in (1, 2):
        raise ValueError("shadows are defined for 1- and 2-chains")
    if is_grid_chain(chain):
        axis = proj.axis
        if axis is None:
            raise ValueError("grid shadows need an axis direction; embed to simplicial first")
        grid = chain.grid
        j, l = [i for i in range(3) if i != axis]
        if chain.k == 2:
            cells = set()
            for cell in chain.cells:
                if axis in cell.axes:
                    continue
                cells ^= {(cell.base[j], cell.base[l])}
            return PlanarChain(
                k=2,
                kind="cells",
                cells=frozenset(cells),
                epsilon=grid.epsilon,
                origin=(grid.origin[j], grid.origin[l]),
            )
        segs = []
        for cell in chain.cells:
            if cell.axes[0] == axis:
                continue
            p, q = _grid_edge_ends(grid, cell)
            segs.append((proj.project2(p), proj.project2(q)))
        return PlanarChain(k=1, kind="segments", segments=_overlay2(segs))
    if chain.k == 2:
        tris = set()
        for simplex in chain.simplices:
            img = tuple(sorted(proj.project2(p) for p in simplex))
            if shoelace_twice(img) == 0:
                continue
            tris ^= {img}
        return PlanarChain(
            k=2, kind="triangles", triangles=tuple(sorted(tris)), area_scale=proj.area_scale()
        )
    segs = []
    for a, b in chain.simplices:
        pa, pb = proj.project2(a), proj.project2(b)
        if pa != pb:
            segs.append((pa, pb))
    return PlanarChain(k=1, kind="segments", segments=_overlay2(segs))


# ---------------------------------------------------------------------------
# spanning

def _gamma_segments_3d(gamma: Chain) -> list[tuple[Point, Point]]:
    if is_grid_chain(gamma):
        return [_grid_edge_ends(gamma.grid, cell) for cell in gamma.cells]
    return [(s[0], s[1]) for s in gamma.simplices]


def _film_jump_segments(B: Chain, proj: ProjectionDir) -> list[tuple[Point2, Point2]]:
    """Projected cell borders; parity jumps of the shadow live on these."""
    out = []
    if is_grid_chain(B):
        for cell in B.cells:
            cyc = [proj.project2(p) for p in _grid_face_corners(B.grid, cell)]
            for i in range(4):
                a, b = cyc[i], cyc[(i + 1) % 4]
                if a != b:
                    out.append((a, b))
    else:
        for simplex in B.simplices:
            img = [proj.project2(p) for p in simplex]
            for i in range(3):
                a, b = img[i], img[(i + 1) % 3]
                if a != b:
                    out.append((a, b))
    return out


def _segments_share_ground(a, b, shared: int) -> bool:
    """True when two plane segments meet outside common endpoints."""

    def orient(p, q, r):
        d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return (d > 0) - (d < 0)

    def within(p, q, r):
        return (
            min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
            and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
        )

    (a1, a2), (b1, b2) = a, b
    if shared == 1:
        common = ({a1, a2} & {b1, b2}).pop()
        ao = a2 if a1 == common else a1
        bo = b2 if b1 == common else b1
        if orient(common, ao, bo) != 0:
            return False
        dot = (ao[0] - common[0]) * (bo[0] - common[0]) + (ao[1] - common[1]) * (
            bo[1] - common[1]
        )
        return dot > 0
    o1, o2 = orient(a1, a2, b1), orient(a1, a2, b2)
    o3, o4 = orient(b1, b2, a1), orient(b1, b2, a2)
    if o1 != o2 and o3 != o4:
        return True
    for p, q, r in ((a1, a2, b1), (a1, a2, b2), (b1, b2, a1), (b1, b2, a2)):
        if orient(p, q, r) == 0 and within(p, q, r):
            return True
    return False


def _admissibility(gamma: Chain, proj: ProjectionDir):
    """(ok, reason, projected segments); embedded-closed-curve test."""
    segs3 = _gamma_segments_3d(gamma)
    if not segs3:
        return False, "empty curve", []
    axis_dir = primitive_direction(proj.direction)
    for p, q in segs3:
        if primitive_direction(vsub(q, p)) == axis_dir:
            return False, "curve segment parallel to projection direction", []
    segs2 = [(proj.project2(p), proj.project2(q)) for p, q in segs3]
    degree: dict[Point2, int] = {}
    for a, b in segs2:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    if any(d != 2 for d in degree.values()):
        return False, "projected curve is not a single closed curve", segs2
    adjacency: dict[Point2, list[Point2]] = {}
    for a, b in segs2:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    start = next(iter(adjacency))
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adjacency[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(adjacency):
        return False, "projected curve is not connected", segs2
    for i in range(len(segs2)):
        for j in range(i + 1, len(segs2)):
            shared = len(set(segs2[i]) & set(segs2[j]))
            if shared == 2:
                return False, "projected curve self-intersects", segs2
            if _segments_share_ground(segs2[i], segs2[j], shared):
                return False, "projected curve self-intersects", segs2
    return True, "ok", segs2


def _cycle_area(segs2, scale: RadicalSum) -> RadicalSum:
    adjacency: dict[Point2, list[Point2]] = {}
    for a, b in segs2:
        adjacency.setdefault(a, []).append(b)
        adjacency.setdefault(b, []).append(a)
    start = min(adjacency)
    cycle = [start]
    prev = None
    cur = start
    while True:
        nxt = [p for p in adjacency[cur] if p != prev]
        step = nxt[0] if nxt else prev
        if step == start:
            break
        cycle.append(step)
        prev, cur = cur, step
    doubled = shoelace_twice(cycle)
    return scale * (abs(doubled) / 2)


def region_cells(gamma: GridChain, axis: int) -> frozenset:
    """Lattice cells of the plane region enclosed by an axis shadow of gamma.

    Decided per cell center by even-odd ray crossing; centers sit at
    half-integer lattice points and projected grid edges on integer
    lines, so no crossing is ever ambiguous.
    """
    proj = ProjectionDir.along_axis(axis)
    ok, reason, segs2 = _admissibility(gamma, proj)
    if not ok:
        raise ValueError(f"inadmissible axis projection: {reason}")
    grid = gamma.grid
    j, l = [i for i in range(3) if i != axis]
    sx = [(a[0], b[0]) for a, b in segs2]
    sy = [(a[1], b[1]) for a, b in segs2]
    lo_x = min(min(p) for p in sx)
    hi_x = max(max(p) for p in sx)
    lo_y = min(min(p) for p in sy)
    hi_y = max(max(p) for p in sy)
    eps = grid.epsilon
    i_lo = int(((lo_x - grid.origin[j]) / eps).__floor__())
    i_hi = int(((hi_x - grid.origin[j]) / eps).__ceil__())
    m_lo = int(((lo_y - grid.origin[l]) / eps).__floor__())
    m_hi = int(((hi_y - grid.origin[l]) / eps).__ceil__())
    out = set()
    for i in range(i_lo, i_hi):
        for m in range(m_lo, m_hi):
            cx = grid.origin[j] + eps * i + eps / 2
            cy = grid.origin[l] + eps * m + eps / 2
            crossings = 0
            for (x1, y1), (x2, y2) in segs2:
                if (y1 > cy) != (y2 > cy):
                    x_at = x1 + (cy - y1) * (x2 - x1) / (y2 - y1)
                    if x_at > cx:
                        crossings += 1
            if crossings % 2:
                out.add((i, m))
    return frozenset(out)


@dataclass(frozen=True)
class DirectionReport:
    direction: ProjectionDir
    admissible: bool
    reason: str
    matches: Optional[bool]
    region_area: Optional[RadicalSum]


@dataclass(frozen=True)
class SpanningReport:
    boundary_ok: bool
    verdict: str
    directions: tuple[DirectionReport, ...]
    max_region_area: Optional[RadicalSum]

    @property
    def spans(self) -> bool:
        return self.verdict == "spans"

    def __bool__(self) -> bool:
        return self.spans


def spanning_check(
    A: Dipolyhedron, gamma: Chain, dirs: Optional[Sequence[ProjectionDir]] = None
) -> SpanningReport:
    """Does the pair span the closed curve gamma?

    Preconditions checked first: boundary(C) = 0 and boundary(B) + C =
    gamma.  Then, for every admissible direction, the film shadow must
    equal the region enclosed by the projected curve; the jump segments
    of shadow plus region must cancel in the interval-parity overlay.
    Verdicts: "spans", "fails", "vacuous" (no admissible direction,
    inconclusive), "boundary-mismatch".
    """
    if A.k != 2:
        raise ValueError("spanning is defined for films of dimension 2")
    if is_grid_chain(gamma) != (A.rep == "grid"):
        raise ValueError("curve and pair must share one representation")
    if dirs is None:
        dirs = default_directions()

    residual = chain_boundary(A.B) + A.C + gamma
    boundary_ok = chain_is_zero(chain_boundary(A.C)) and chain_is_zero(residual)
    if not boundary_ok:
        return SpanningReport(False, "boundary-mismatch", (), None)

    reports = []
    max_area = None
    all_match = True
    any_admissible = False
    for proj in dirs:
        ok, reason, segs2 = _admissibility(gamma, proj)
        if not ok:
            reports.append(DirectionReport(proj, False, reason, None, None))
            continue
        any_admissible = True
        area = _cycle_area(segs2, proj.area_scale())
        matches = not overlay_leftover(
            [(_lift2(a), _lift2(b)) for a, b in _film_jump_segments(A.B, proj) + segs2]
        )
        if not matches:
            all_match = False
        if max_area is None or area > max_area:
            max_area = area
        reports.append(DirectionReport(proj, True, "ok", matches, area))

    if not any_admissible:
        verdict = "vacuous"
    elif all_match:
        verdict = "spans"
    else:
        verdict = "fails"
    return SpanningReport(True, verdict, tuple(reports), max_area)
