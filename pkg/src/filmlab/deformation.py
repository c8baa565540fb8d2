"""Deformation of simplicial chains onto a cubical grid.

A chain is pushed into the grid skeleton one dimension at a time: inside
every cube (then every face) that still carries a piece of the chain, a
well separated interior center is chosen and the cell's content is
projected radially onto the cell boundary.  Pieces are first subdivided
along the wedge planes through the center and the cell's boundary edges,
so each piece lands inside a single facet and projects to an honest
straight simplex.  Once the chain lies in the k-skeleton, covering parity
at a generic point of each k-face decides which whole faces make up the
grid chain P.

Every run returns chains Q (dim k) and R (dim k+1) with the exact mod-2
identity  A = P + Q + dR,  verified geometrically before returning, plus
measured mass ratios and support distances.  Q is assembled as
A + P + dR with the geometrically void part pruned away, so the identity
holds by construction and the reported M(Q) reflects actual content.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional

from .dipolyhedra import Dipolyhedron, EnergySplit, boundary_dip, energy, is_grid_chain
from .exact import RadicalSum, sqrt_enclosure
from .geom import (
    Plane,
    Point,
    Simplex,
    centroid,
    is_degenerate,
    line_key,
    plane_key,
    point_simplex_dist_sq,
    simplex_measure_sq,
    split_chain_pieces,
    vadd,
    vscale,
    vsub,
)
from .grid import GridCell, GridChain, GridSpec, boundary_grid, chain_of, mass_grid
from .overlay import (
    IN,
    ON,
    EqualityCertificate,
    _point_status,
    chains_equal_mod2,
    is_zero_geometric,
    overlay_leftover,
)
from .simplicial import (
    SimplicialChain,
    boundary_simplicial,
    embed_grid_chain,
    empty_simplicial,
    mass_simplicial,
    simplicial_chain,
)

_UNIT = (
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(0), Fraction(1)),
)

# equality checks must stay exact regardless of presentation size
_VERIFY_LIMIT = 10**9


@dataclass(frozen=True)
class DeformConfig:
    """Knobs for the grid deformation.

    ``tau`` is the clearance radius for projection centers as a fraction
    of the grid spacing; candidates closer than ``tau * epsilon`` to the
    chain are rejected.  ``c_max`` caps the acceptable measured mass
    ratios.
    """

    epsilon: Fraction
    candidate_centers: int = 16
    tau: Fraction = Fraction(1, 8)
    seed: int = 0
    c_max: int = 100

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        object.__setattr__(self, "tau", Fraction(self.tau))
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not Fraction(0) < self.tau < Fraction(1, 2):
            raise ValueError("center clearance must lie in (0, 1/2)")
        if self.candidate_centers < 1:
            raise ValueError("need at least one center candidate per cell")
        if self.c_max <= 0:
            raise ValueError("c_max must be positive")


@dataclass(frozen=True)
class SupportReport:
    """Largest vertex distances of the output from the input supports.

    ``chain_dist`` covers vertices of P and R against |A|; ``boundary_dist``
    covers vertices of dP and Q against |dA|.  ``None`` means some output
    vertex had no target to compare against (empty input support).
    """

    chain_dist: Optional[RadicalSum]
    boundary_dist: Optional[RadicalSum]
    within_6eps: bool


@dataclass(frozen=True)
class DeformationResult:
    P: GridChain
    Q: SimplicialChain
    R: SimplicialChain
    measured: dict
    bounds_ok: dict
    support: SupportReport
    identity: EqualityCertificate
    fallback_cells: tuple


# -- lattice bookkeeping -----------------------------------------------------


def _lattice_coord(grid: GridSpec, value: Fraction, axis: int) -> Fraction:
    return (Fraction(value) - grid.origin[axis]) / grid.epsilon


def _carrier(grid: GridSpec, s: Simplex) -> GridCell:
    """Smallest closed grid cell containing the simplex.

    Requires the simplex to fit in one cell per axis, which the initial
    clipping guarantees.
    """
    base = [0, 0, 0]
    axes = []
    for a in (0, 1, 2):
        vals = [_lattice_coord(grid, v[a], a) for v in s]
        first = vals[0]
        if all(v == first for v in vals) and first.denominator == 1:
            base[a] = int(first)
            continue
        lo, hi = min(vals), max(vals)
        i = math.floor(lo)
        if hi > i + 1:
            raise ValueError("piece spans more than one grid cell")
        base[a] = i
        axes.append(a)
    return GridCell(tuple(base), tuple(axes))


def _clip_to_grid(chain: SimplicialChain, grid: GridSpec) -> list:
    """Cut the presentation along all interior lattice planes."""
    pieces = list(chain.simplices)
    if not pieces:
        return []
    lo, hi = grid.box()
    for s in pieces:
        for v in s:
            for a in (0, 1, 2):
                if not lo[a] <= v[a] <= hi[a]:
                    raise ValueError("chain extends outside the grid box")
    for a in (0, 1, 2):
        for i in range(1, grid.dims[a]):
            plane = Plane(_UNIT[a], grid.origin[a] + grid.epsilon * i)
            neg, on, pos = split_chain_pieces(pieces, plane)
            pieces = neg + on + pos
    return pieces


# -- projection centers ------------------------------------------------------


def _center_candidates(grid: GridSpec, cell: GridCell, cfg: DeformConfig) -> list:
    rng = random.Random(f"filmlab-deform:{cfg.seed}:{cell.axes_label()}:{cell.base}")
    out = []
    for _ in range(cfg.candidate_centers):
        coords = []
        for a in (0, 1, 2):
            q = Fraction(cell.base[a])
            if a in cell.axes:
                q += Fraction(rng.randint(1, 63), 64)
            coords.append(grid.origin[a] + grid.epsilon * q)
        out.append(tuple(coords))
    return out


def _wedge_planes(grid: GridSpec, cell: GridCell, center: Point) -> list:
    """Planes through the center and the cell's boundary edges (or corners)."""
    planes = []
    if cell.dim == 3:
        for a in (0, 1, 2):
            others = [x for x in (0, 1, 2) if x != a]
            for o1 in (0, 1):
                for o2 in (0, 1):
                    corner = list(cell.base)
                    corner[others[0]] += o1
                    corner[others[1]] += o2
                    p = grid.world(tuple(corner))
                    corner[a] += 1
                    q = grid.world(tuple(corner))
                    planes.append(
                        Plane.through(center, vsub(p, center), vsub(q, center))
                    )
    elif cell.dim == 2:
        normal_axis = next(a for a in (0, 1, 2) if a not in cell.axes)
        for corner in cell.corners():
            p = grid.world(corner)
            planes.append(Plane.through(center, vsub(p, center), _UNIT[normal_axis]))
    else:
        raise ValueError("projection cells must have dimension 2 or 3")
    return planes


def _exit_facet(grid: GridSpec, cell: GridCell, center: Point, x: Point):
    """Axis and plane offset of the boundary facet hit first by the ray center -> x."""
    best = None
    for a in cell.axes:
        d = x[a] - center[a]
        if d == 0:
            continue
        step = cell.base[a] + 1 if d > 0 else cell.base[a]
        beta = grid.origin[a] + grid.epsilon * step
        t = (beta - center[a]) / d
        if best is None or t < best[0]:
            best = (t, a, beta)
    if best is None:
        raise ValueError("projection ray is undefined at the center")
    return best[1], best[2]


def _project_vertex(center: Point, v: Point, axis: int, beta: Fraction) -> Point:
    t = (beta - center[axis]) / (v[axis] - center[axis])
    return vadd(center, vscale(t, vsub(v, center)))


def _project_cell_pieces(grid: GridSpec, cell: GridCell, center: Point, pieces: list):
    """Wedge-split each piece and project it radially onto the cell boundary.

    Returns, per input piece, a list of (sub-piece, image) pairs; images can
    be degenerate when a sub-piece lies in a plane through the center.
    """
    planes = _wedge_planes(grid, cell, center)
    out = []
    for s in pieces:
        subs = [s]
        for plane in planes:
            neg, on, pos = split_chain_pieces(subs, plane)
            subs = neg + on + pos
        pairs = []
        for sub in subs:
            axis, beta = _exit_facet(grid, cell, center, centroid(sub))
            image = tuple(_project_vertex(center, v, axis, beta) for v in sub)
            pairs.append((sub, image))
        out.append(pairs)
    return out


_FACT = (1.0, 1.0, 2.0, 6.0)


def _projected_mass_float(proj) -> float:
    total = 0.0
    for pairs in proj:
        for _, image in pairs:
            total += math.sqrt(float(simplex_measure_sq(image))) / _FACT[len(image) - 1]
    return total


def _projected_mass_decimal(proj) -> Decimal:
    # 60-digit sqrt: deterministic tie-break without radical factorization
    with localcontext() as ctx:
        ctx.prec = 60
        total = Decimal(0)
        for pairs in proj:
            for _, image in pairs:
                q = simplex_measure_sq(image)
                root = (Decimal(q.numerator) / Decimal(q.denominator)).sqrt()
                total += root / int(_FACT[len(image) - 1])
        return total


def _float_point(p) -> tuple:
    return (float(p[0]), float(p[1]), float(p[2]))


def _dist_sq_float(p: tuple, s: tuple) -> float:
    """Float point-to-simplex squared distance (prescreen only)."""

    def sub(a, b):
        return (a[0] - b[0], a[1] - b[1], a[2] - b[2])

    def dot(a, b):
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

    if len(s) == 1:
        d = sub(p, s[0])
        return dot(d, d)
    if len(s) == 2:
        a, b = s
        ab = sub(b, a)
        denom = dot(ab, ab)
        t = 0.0 if denom == 0.0 else max(0.0, min(1.0, dot(sub(p, a), ab) / denom))
        d = sub(p, (a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]))
        return dot(d, d)
    a, b, c = s
    ab, ac, ap = sub(b, a), sub(c, a), sub(p, a)
    d1, d2 = dot(ab, ap), dot(ac, ap)
    if d1 <= 0.0 and d2 <= 0.0:
        return dot(ap, ap)
    bp = sub(p, b)
    d3, d4 = dot(ab, bp), dot(ac, bp)
    if d3 >= 0.0 and d4 <= d3:
        return dot(bp, bp)
    cp = sub(p, c)
    d5, d6 = dot(ab, cp), dot(ac, cp)
    if d6 >= 0.0 and d5 <= d6:
        return dot(cp, cp)
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        t = d1 / (d1 - d3)
        d = sub(ap, (t * ab[0], t * ab[1], t * ab[2]))
        return dot(d, d)
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        t = d2 / (d2 - d6)
        d = sub(ap, (t * ac[0], t * ac[1], t * ac[2]))
        return dot(d, d)
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and d4 - d3 >= 0.0 and d5 - d6 >= 0.0:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        bc = sub(c, b)
        d = sub(bp, (t * bc[0], t * bc[1], t * bc[2]))
        return dot(d, d)
    denom = va + vb + vc
    if denom == 0.0:
        return min(dot(ap, ap), dot(bp, bp), dot(cp, cp))
    v, w = vb / denom, vc / denom
    d = sub(ap, (v * ab[0] + w * ac[0], v * ab[1] + w * ac[1], v * ab[2] + w * ac[2]))
    return dot(d, d)


def _clearance_sq(candidate: Point, pieces: list, floats: list, cut: Fraction):
    """Clearance classification: float prescreen, exact at the 2% band."""
    fcut = float(cut)
    fc = _float_point(candidate)
    fd = min(_dist_sq_float(fc, fs) for fs in floats)
    if fd > fcut * 1.02:
        return True, None
    if fd < fcut * 0.98:
        return False, None
    d2 = min(point_simplex_dist_sq(candidate, s) for s in pieces)
    return d2 >= cut, d2


def _choose_center(grid: GridSpec, cell: GridCell, pieces: list, cfg: DeformConfig):
    """Pick the cell's projection center: cleared candidates only, least
    projected mass, high-precision comparison when floats are too close."""
    candidates = _center_candidates(grid, cell, cfg)
    cut = (cfg.tau * grid.epsilon) ** 2
    floats = [tuple(_float_point(v) for v in s) for s in pieces]
    admitted = [
        i for i, c in enumerate(candidates)
        if _clearance_sq(c, pieces, floats, cut)[0]
    ]
    fallback = not admitted
    if fallback:
        # every candidate is too close to the chain: take the farthest one
        best, best_d2 = 0, None
        for i, c in enumerate(candidates):
            d2 = min(point_simplex_dist_sq(c, s) for s in pieces)
            if best_d2 is None or d2 > best_d2:
                best, best_d2 = i, d2
        admitted = [best]
    scored = []
    for i in admitted:
        proj = _project_cell_pieces(grid, cell, candidates[i], pieces)
        scored.append((_projected_mass_float(proj), i, proj))
    low = min(m for m, _, _ in scored)
    close = [t for t in scored if t[0] <= low + 1e-9 * (1.0 + low)]
    if len(close) == 1:
        _, i, proj = close[0]
        return candidates[i], proj, fallback
    winner = None
    winner_mass = None
    for _, i, proj in close:
        m = _projected_mass_decimal(proj)
        if winner is None or m < winner_mass:
            winner, winner_mass = (i, proj), m
    i, proj = winner
    return candidates[i], proj, fallback


# -- the deformation pipeline ------------------------------------------------


def _run_pipeline(entries: list, grid: GridSpec, cfg: DeformConfig):
    """Deform all entry chains together, sharing the center choices.

    Returns per-entry final piece lists, per-entry raw track simplices (one
    dimension up), and the cells where the clearance fallback fired.
    """
    states = [_clip_to_grid(ch, grid) for ch in entries]
    tracks = [[] for _ in entries]
    fallbacks = []
    for d in (3, 2):
        buckets = {}
        for ei, pieces in enumerate(states):
            for pi, s in enumerate(pieces):
                if len(s) - 1 >= d:
                    continue
                car = _carrier(grid, s)
                if car.dim == d:
                    buckets.setdefault(car, []).append((ei, pi))
        replacements = [{} for _ in entries]
        for cell in sorted(buckets):
            members = buckets[cell]
            cell_pieces = [states[ei][pi] for ei, pi in members]
            center, proj, fb = _choose_center(grid, cell, cell_pieces, cfg)
            if fb:
                fallbacks.append(cell)
            for (ei, pi), pairs in zip(members, proj):
                images = []
                for sub, image in pairs:
                    tracks[ei].append(sub + (center,))
                    tracks[ei].append(image + (center,))
                    if not is_degenerate(image):
                        images.append(image)
                replacements[ei][pi] = images
        for ei, repl in enumerate(replacements):
            if not repl:
                continue
            rebuilt = []
            for pi, s in enumerate(states[ei]):
                if pi in repl:
                    rebuilt.extend(repl[pi])
                else:
                    rebuilt.append(s)
            states[ei] = rebuilt
    return states, tracks, fallbacks


def snap_parity(residue: SimplicialChain, grid: GridSpec, seed: int = 0) -> GridChain:
    """Snap a chain lying in the k-skeleton to whole grid k-cells.

    Membership of each touched cell is the covering parity of the residue at
    a generic interior rational point of that cell; sample points landing on
    a piece boundary are redrawn deterministically.
    """
    k = residue.k
    if k not in (1, 2):
        raise ValueError("parity snap supports 1- and 2-chains only")
    by_cell = {}
    for s in residue.simplices:
        car = _carrier(grid, s)
        if car.dim != k:
            raise ValueError("residue piece is not supported in the k-skeleton")
        by_cell.setdefault(car, []).append(s)
    cells = []
    for cell in sorted(by_cell):
        group = by_cell[cell]
        rng = random.Random(f"filmlab-snap:{seed}:{cell.axes_label()}:{cell.base}")
        parity = None
        for _ in range(64):
            coords = []
            for a in (0, 1, 2):
                q = Fraction(cell.base[a])
                if a in cell.axes:
                    q += Fraction(rng.randint(1, 9972), 9973)
                coords.append(grid.origin[a] + grid.epsilon * q)
            point = tuple(coords)
            hits = 0
            boundary = False
            for s in group:
                st = _point_status(point, s)
                if st == ON:
                    boundary = True
                    break
                hits += st == IN
            if boundary:
                continue
            parity = hits % 2
            break
        if parity is None:
            raise RuntimeError("no generic sample point found for parity snap")
        if parity:
            cells.append(cell)
    return chain_of(grid, k, cells)


def _prune_zero_groups(chain: SimplicialChain) -> SimplicialChain:
    """Drop the geometrically void part of a chain, carrier by carrier.

    1-chains are rewritten to the canonical leftover segments per line, so
    their reported mass is the true geometric mass.  2-chains keep their
    presentation on planes that carry actual content.
    """
    if chain.k == 1:
        groups = {}
        for s in chain.simplices:
            groups.setdefault(line_key(*s), []).append(s)
        kept = []
        for segs in groups.values():
            kept.extend(overlay_leftover(segs))
        return simplicial_chain(1, kept)
    if chain.k == 2:
        groups = {}
        for s in chain.simplices:
            groups.setdefault(plane_key(*s), []).append(s)
        kept = []
        for group in groups.values():
            if not is_zero_geometric(SimplicialChain(2, frozenset(group))):
                kept.extend(group)
        return SimplicialChain(2, frozenset(kept))
    raise ValueError("pruning supports 1- and 2-chains only")


# -- reports -----------------------------------------------------------------


def _leq(a, b) -> bool:
    ra = a if isinstance(a, RadicalSum) else RadicalSum.from_fraction(a)
    rb = b if isinstance(b, RadicalSum) else RadicalSum.from_fraction(b)
    return ra <= rb


def _ratio(num, den) -> float:
    n, d = float(num), float(den)
    if d == 0.0:
        return 0.0 if n == 0.0 else math.inf
    return n / d


def _mass_interval(x, bits: int):
    """Rational enclosure of a mass: exact for grid masses and Fractions."""
    if isinstance(x, SimplicialChain):
        lo = hi = Fraction(0)
        fact = int(_FACT[x.k])
        for s in x.simplices:
            a, b = sqrt_enclosure(simplex_measure_sq(s), bits)
            lo += a / fact
            hi += b / fact
        return lo, hi
    f = Fraction(x)
    return f, f


def _mass_float(x) -> float:
    if isinstance(x, SimplicialChain):
        fact = _FACT[x.k]
        return sum(math.sqrt(float(simplex_measure_sq(s))) / fact for s in x.simplices)
    return float(x)


def _exact_mass(x):
    if isinstance(x, SimplicialChain):
        return mass_simplicial(x)
    return Fraction(x)


def _leq_mass(lhs, rhs_terms) -> bool:
    """Sound test  mass(lhs) <= sum coeff * mass(term),  enclosures first."""
    for bits in (64, 256):
        llo, lhi = _mass_interval(lhs, bits)
        rlo = rhi = Fraction(0)
        for coeff, term in rhs_terms:
            tlo, thi = _mass_interval(term, bits)
            rlo += coeff * tlo
            rhi += coeff * thi
        if lhi <= rlo:
            return True
        if llo > rhi:
            return False
    rhs = RadicalSum.from_fraction(0)
    for coeff, term in rhs_terms:
        rhs = rhs + _exact_mass(term) * coeff
    return _leq(_exact_mass(lhs), rhs)


def _support_dist_sq(vertices, targets) -> Optional[Fraction]:
    """Max-min squared distance from output vertices to target pieces.

    Float prescreen picks the candidate worst vertices; the returned value
    is computed exactly on that band.
    """
    if not vertices:
        return Fraction(0)
    if not targets:
        return None
    floats = [tuple(_float_point(v) for v in s) for s in targets]
    verts = sorted(set(vertices))
    scores = []
    for v in verts:
        fv = _float_point(v)
        scores.append(min(_dist_sq_float(fv, fs) for fs in floats))
    top = max(scores)
    band = top - 1e-6 * (1.0 + top)
    worst = Fraction(0)
    for v, score in zip(verts, scores):
        if score < band:
            continue
        d2 = min(point_simplex_dist_sq(v, s) for s in targets)
        if d2 > worst:
            worst = d2
    return worst


def _grid_vertices(grid: GridSpec, chain: GridChain) -> list:
    return [grid.world(c) for cell in chain.cells for c in cell.corners()]


def _chain_vertices(chain: SimplicialChain) -> list:
    return [v for s in chain.simplices for v in s]


def _finish_entry(
    A: SimplicialChain,
    final_pieces: list,
    track_raws: list,
    grid: GridSpec,
    cfg: DeformConfig,
    fallbacks: tuple,
) -> DeformationResult:
    """Assemble P, Q, R for one deformed chain and verify the identity."""
    k = A.k
    R = simplicial_chain(k + 1, track_raws)
    residue = simplicial_chain(k, final_pieces)
    P = snap_parity(residue, grid, cfg.seed)
    dR = boundary_simplicial(R)
    embedded_P = embed_grid_chain(P)
    Q = _prune_zero_groups(A + embedded_P + dR)
    cert = chains_equal_mod2(A + embedded_P, Q + dR, mode="exact", max_exact=_VERIFY_LIMIT)
    if not cert.equal:
        raise RuntimeError("deformation identity failed geometric verification")

    dA = boundary_simplicial(A)
    dP = boundary_grid(P)
    eps = grid.epsilon
    mA, mdA = _mass_float(A), _mass_float(dA)
    mP, mdP = mass_grid(P), mass_grid(dP)
    measured = {
        "cP": _ratio(mP, mA + float(eps) * mdA),
        "cdP": _ratio(mdP, mdA),
        "cQ": _ratio(_mass_float(Q), float(eps) * mdA),
        "cR": _ratio(_mass_float(R), float(eps) * mA),
    }
    c = cfg.c_max
    bounds_ok = {
        "cP": _leq_mass(mP, [(c, A), (c * eps, dA)]),
        "cdP": _leq_mass(mdP, [(c, dA)]),
        "cQ": _leq_mass(Q, [(c * eps, dA)]),
        "cR": _leq_mass(R, [(c * eps, A)]),
    }

    chain_d2 = _support_dist_sq(
        _grid_vertices(grid, P) + _chain_vertices(R), list(A.simplices)
    )
    boundary_d2 = _support_dist_sq(
        _grid_vertices(grid, dP) + _chain_vertices(Q), list(dA.simplices)
    )
    limit = 36 * eps * eps
    within = (
        chain_d2 is not None
        and boundary_d2 is not None
        and chain_d2 <= limit
        and boundary_d2 <= limit
    )
    support = SupportReport(
        None if chain_d2 is None else RadicalSum.sqrt(chain_d2),
        None if boundary_d2 is None else RadicalSum.sqrt(boundary_d2),
        within,
    )
    return DeformationResult(P, Q, R, measured, bounds_ok, support, cert, fallbacks)


def deform_chain(A: SimplicialChain, grid: GridSpec, cfg: DeformConfig) -> DeformationResult:
    """Deform a 1- or 2-chain onto the grid skeleton.

    Returns the snapped grid chain P together with chains Q and R realizing
    the exact identity A = P + Q + dR mod 2, geometric verification
    included, plus measured constants and support distances.
    """
    if A.k not in (1, 2):
        raise ValueError("deformation supports 1- and 2-chains only")
    if cfg.epsilon != grid.epsilon:
        raise ValueError("config epsilon disagrees with the grid spacing")
    finals, tracks, fallbacks = _run_pipeline([A], grid, cfg)
    return _finish_entry(A, finals[0], tracks[0], grid, cfg, tuple(fallbacks))


# -- dipolyhedra -------------------------------------------------------------


@dataclass(frozen=True)
class DipoleDeformationReport:
    """Per-component results plus assembled energies and measured ratios."""

    film: DeformationResult
    mass: DeformationResult
    energy_D: object
    energy_dD: object
    energy_Q: object
    energy_R: object
    measured: dict
    bounds_ok: dict
    mass_residual_zero: bool
    fallback_cells: tuple


def _as_simplicial(chain) -> SimplicialChain:
    return embed_grid_chain(chain) if is_grid_chain(chain) else chain


def deform_dipolyhedron(A: Dipolyhedron, gamma, grid: GridSpec, cfg: DeformConfig):
    """Deform a 2-dimensional dipolyhedron with boundary curve gamma.

    Requires dC = 0 and dB + C = gamma.  B and C are deformed together with
    shared center choices; the result is the grid dipolyhedron
    D = (P_B, P_C) with Q = (Q_B + R_C, 0) and R = (R_B, R_C), and the
    identity A = D + Q + dR is verified at the dipolyhedron level.
    """
    if A.k != 2:
        raise ValueError("dipolyhedron deformation supports k = 2 only")
    if cfg.epsilon != grid.epsilon:
        raise ValueError("config epsilon disagrees with the grid spacing")
    B = _as_simplicial(A.B)
    C = _as_simplicial(A.C)
    curve = _as_simplicial(gamma)
    if curve.k != 1:
        raise ValueError("gamma must be a 1-chain")
    if not boundary_simplicial(C).is_zero_presentation():
        raise ValueError("precondition failed: the mass part must be a cycle")
    closure = chains_equal_mod2(
        boundary_simplicial(B) + C, curve, mode="exact", max_exact=_VERIFY_LIMIT
    )
    if not closure.equal:
        raise ValueError("precondition failed: dB + C must equal gamma")

    finals, tracks, fallbacks = _run_pipeline([B, C], grid, cfg)
    fb = tuple(fallbacks)
    film = _finish_entry(B, finals[0], tracks[0], grid, cfg, fb)
    mass = _finish_entry(C, finals[1], tracks[1], grid, cfg, fb)

    D = Dipolyhedron(film.P, mass.P)
    Q = Dipolyhedron(film.Q + mass.R, empty_simplicial(1))
    R = Dipolyhedron(film.R, mass.R)

    dR = boundary_dip(R)
    film_cert = chains_equal_mod2(
        B + embed_grid_chain(D.B), Q.B + dR.B, mode="exact", max_exact=_VERIFY_LIMIT
    )
    mass_cert = chains_equal_mod2(
        C + embed_grid_chain(D.C), Q.C + dR.C, mode="exact", max_exact=_VERIFY_LIMIT
    )
    if not (film_cert.equal and mass_cert.equal):
        raise RuntimeError("dipolyhedron deformation identity failed verification")

    eps = grid.epsilon
    dD = boundary_dip(D)
    e_D, e_dD = energy(D), energy(dD)
    e_Q = EnergySplit(
        _mass_float(Q.B) + _mass_float(Q.C), _mass_float(Q.B), _mass_float(Q.C)
    )
    e_R = EnergySplit(
        _mass_float(R.B) + _mass_float(R.C), _mass_float(R.B), _mass_float(R.C)
    )
    dB = boundary_simplicial(B)
    boundary_mass = mass_grid(boundary_grid(D.B) + D.C)
    measured = {
        "cE": _ratio(e_D.energy, _mass_float(B) + _mass_float(C) + float(eps) * _mass_float(dB)),
        "cdD": _ratio(boundary_mass, _mass_float(curve)),
    }
    two_c = 2 * cfg.c_max
    bounds_ok = {
        "cE": _leq_mass(e_D.energy, [(two_c, B), (two_c, C), (two_c * eps, dB)]),
        "cdD": _leq_mass(boundary_mass, [(cfg.c_max, curve)]),
    }
    report = DipoleDeformationReport(
        film=film,
        mass=mass,
        energy_D=e_D,
        energy_dD=e_dD,
        energy_Q=e_Q,
        energy_R=e_R,
        measured=measured,
        bounds_ok=bounds_ok,
        mass_residual_zero=mass.Q.is_zero_presentation(),
        fallback_cells=fb,
    )
    return D, Q, R, report
