"""Least-weight grid films spanning a closed curve.

Given a simple closed polygon gamma on the grid 1-skeleton and an energy
budget lam, search for a film/mass pair A = (B, C) with

    boundary(B) + C = gamma,    boundary(C) = 0,
    M(B) + M(C) <= lam,         support inside the centred cube of side
                                lam' = 3 lam / M(gamma),

spanning gamma in every admissible projection direction, and of least
weight W = M(B).

The mass part is never searched independently: any pair passing the
boundary precondition has C = gamma + boundary(B) exactly, so the search
ranges over subsets of the admissible grid faces alone.  Candidates are
enumerated in ascending face count (weight is face count times the cell
area, so the first feasible subset is optimal) with two cheap rejections
before the full spanning check: the energy budget, and per-axis shadow
parities, which must match the region enclosed by the projected curve
column by column.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .dipolyhedra import (
    Dipolyhedron,
    EnergySplit,
    ProjectionDir,
    SpanningReport,
    clamp_dip,
    cone_dip,
    default_directions,
    energy,
    is_grid_chain,
    region_cells,
    spanning_check,
)
from .exact import SQRT3
from .grid import GridCell, GridChain, GridSpec, boundary_grid, chain_of, empty_chain, mass_grid
from .overlay import chains_equal_mod2
from .simplicial import boundary_simplicial, embed_grid_chain


class BudgetError(ValueError):
    """The energy budget cannot be met; carries the budget the cone start
    would need."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


def _edge_ends(cell: GridCell) -> tuple[tuple, tuple]:
    a = cell.axes[0]
    q = list(cell.base)
    q[a] += 1
    return cell.base, tuple(q)


def _validate_curve(gamma: GridChain) -> None:
    if gamma.k != 1:
        raise ValueError("the curve must be a grid 1-chain")
    degree: dict = {}
    for cell in gamma.cells:
        for v in _edge_ends(cell):
            degree[v] = degree.get(v, 0) + 1
    if any(d != 2 for d in degree.values()):
        raise ValueError("the curve must be simple and closed (every vertex of degree 2)")
    adj: dict = {}
    for cell in gamma.cells:
        p, q = _edge_ends(cell)
        adj.setdefault(p, []).append(q)
        adj.setdefault(q, []).append(p)
    start = next(iter(adj))
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(adj):
        raise ValueError("the curve must be connected")


@dataclass(frozen=True)
class PlateauProblem:
    """A spanning problem: curve, energy budget, working cube, directions.

    lam_prime is the side of the centred cube that confines admissible
    pairs; the grid must cover it.
    """

    gamma: GridChain
    lam: Fraction
    lam_prime: Fraction
    grid: GridSpec
    dirs: tuple
    seed: int = 0

    @property
    def cube_half(self) -> Fraction:
        return self.lam_prime / 2


def _cone_pair(gamma: GridChain) -> Dipolyhedron:
    curve = Dipolyhedron(gamma, empty_chain(gamma.grid, 0))
    return cone_dip((0, 0, 0), curve)


def cone_energy(gamma: GridChain):
    """Energy of the cone over the curve from the origin (a radical sum)."""
    return energy(_cone_pair(gamma)).energy


def plateau_problem(
    gamma: GridChain,
    lam=None,
    dirs: Optional[Sequence[ProjectionDir]] = None,
    seed: int = 0,
) -> PlateauProblem:
    """Validate the curve and assemble the problem.

    With no explicit budget, lam defaults to twice the origin-cone energy
    (rounded up to a rational when the cone is oblique).  Raises when the
    curve is not a simple closed grid polygon, when it leaves its own
    working cube, or when the grid fails to cover that cube.
    """
    grid = gamma.grid
    if dirs is None:
        dirs = tuple(default_directions(seed))
    else:
        dirs = tuple(dirs)
    if gamma.is_zero():
        return PlateauProblem(gamma, Fraction(0), Fraction(0), grid, dirs, seed)
    _validate_curve(gamma)
    if lam is None:
        e = cone_energy(gamma)
        lam = 2 * (e.as_fraction() if e.is_rational() else e.enclosure(128)[1])
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("the energy budget must be positive")
    lam_prime = Fraction(3) * lam / mass_grid(gamma)
    half = lam_prime / 2
    for cell in gamma.cells:
        for v in _edge_ends(cell):
            if any(abs(c) > half for c in grid.world(v)):
                raise ValueError("energy budget too small: the curve leaves the working cube")
    lo, hi = grid.box()
    if any(lo[i] > -half or hi[i] < half for i in range(3)):
        raise ValueError("grid does not cover the working cube of the budget")
    return PlateauProblem(gamma, lam, lam_prime, grid, dirs, seed)


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class MembershipReport:
    """Itemised admissibility of a pair for one problem."""

    cycle_ok: bool
    boundary_ok: bool
    budget: EnergySplit
    budget_ok: bool
    support_ok: bool
    spanning: SpanningReport
    trivially_spans: bool = False

    @property
    def member(self) -> bool:
        return (
            self.cycle_ok
            and self.boundary_ok
            and self.budget_ok
            and self.support_ok
            and (self.spanning.spans or self.trivially_spans)
        )

    def failures(self) -> list[str]:
        out = []
        if not self.cycle_ok:
            out.append("mass part is not a cycle")
        if not self.boundary_ok:
            out.append("boundary identity dB + C = gamma fails")
        if not self.budget_ok:
            out.append("energy exceeds the budget")
        if not self.support_ok:
            out.append("support leaves the working cube")
        if not (self.spanning.spans or self.trivially_spans):
            out.append(f"spanning check: {self.spanning.verdict}")
        return out


def _support_in_cube(A: Dipolyhedron, half: Fraction) -> bool:
    if A.rep == "grid":
        for chain in (A.B, A.C):
            for cell in chain.cells:
                for corner in cell.corners():
                    if any(abs(c) > half for c in chain.grid.world(corner)):
                        return False
        return True
    for chain in (A.B, A.C):
        for s in chain.simplices:
            for v in s:
                if any(abs(c) > half for c in v):
                    return False
    return True


def gamma_membership(A: Dipolyhedron, problem: PlateauProblem) -> MembershipReport:
    """Check every admissibility clause of the pair, itemised.

    Works for grid pairs and for simplicial pairs (after clamping); the
    identities are decided exactly either way.
    """
    if A.k != 2:
        raise ValueError("membership is defined for films of dimension 2")
    gamma = problem.gamma
    if A.rep == "grid":
        if A.B.grid != problem.grid:
            raise ValueError("pair lives on a different grid than the problem")
        cycle_ok = boundary_grid(A.C).is_zero()
        boundary_ok = (boundary_grid(A.B) + A.C + gamma).is_zero()
        curve = gamma
    else:
        # 0-simplices are canonical points, so presentational zero is exact
        cycle_ok = boundary_simplicial(A.C).is_zero_presentation()
        curve = embed_grid_chain(gamma)
        boundary_ok = bool(chains_equal_mod2(boundary_simplicial(A.B) + A.C, curve))
    split = energy(A)
    budget_ok = bool(split.energy <= problem.lam)
    support_ok = _support_in_cube(A, problem.cube_half)
    span = spanning_check(A, curve, problem.dirs)
    trivial = gamma.is_zero() and not span.spans and cycle_ok and boundary_ok and _is_zero_pair(A)
    return MembershipReport(cycle_ok, boundary_ok, split, budget_ok, support_ok, span, trivial)


def _is_zero_pair(A: Dipolyhedron) -> bool:
    if A.rep == "grid":
        return A.B.is_zero() and A.C.is_zero()
    return A.B.is_zero_presentation() and A.C.is_zero_presentation()


# ---------------------------------------------------------------------------
# cone start


@dataclass(frozen=True)
class ConeStart:
    """Grid-feasible starting pair obtained by deforming the origin cone.

    bounds carries two a-priori ceilings on the cone energy: the plain
    one lam' M(gamma) / (k+1) = lam, and the same scaled by sqrt(3) (the
    cube-geometry factor); the measured energy is checked against both.
    """

    pair: Dipolyhedron
    cone_energy: object
    membership: MembershipReport
    bounds: dict
    bounds_ok: dict
    fallback_cells: tuple = ()


def initial_cone_solution(problem: PlateauProblem, deform_config=None) -> ConeStart:
    """Cone the curve from the origin, then push the cone onto the grid.

    The cone pair delta(0 gamma) has boundary delta gamma by the cone
    identity, so after deformation the film part P_B determines an exact
    grid pair (P_B, gamma + dP_B).  Raises BudgetError when even the cone
    exceeds the energy budget.
    """
    from .deformation import DeformConfig, deform_dipolyhedron

    gamma = problem.gamma
    grid = problem.grid
    if gamma.is_zero():
        zero = Dipolyhedron(empty_chain(grid, 2), empty_chain(grid, 1))
        return ConeStart(zero, Fraction(0), gamma_membership(zero, problem), {}, {})
    cone = _cone_pair(gamma)
    e = energy(cone).energy
    if not e <= problem.lam:
        raise BudgetError(
            f"energy budget {problem.lam} below the cone energy; need at least {float(e):.6g}",
            required=e,
        )
    plain = problem.lam_prime * mass_grid(gamma) / 3
    bounds = {"lam": plain, "lam_scaled": SQRT3 * plain}
    bounds_ok = {name: bool(e <= value) for name, value in bounds.items()}
    if deform_config is None:
        deform_config = DeformConfig(epsilon=grid.epsilon, seed=problem.seed)
    D, _, _, report = deform_dipolyhedron(cone, embed_grid_chain(gamma), grid, deform_config)
    B0 = D.B
    pair = Dipolyhedron(B0, gamma + boundary_grid(B0))
    return ConeStart(pair, e, gamma_membership(pair, problem), bounds, bounds_ok, report.fallback_cells)


# ---------------------------------------------------------------------------
# weight minimisation


@dataclass(frozen=True)
class PlateauSolution:
    pair: Dipolyhedron
    weight: Fraction
    energy: Fraction
    feasibility: MembershipReport
    optimality: str  # "exact" | "upper-bound"
    method: str
    nodes: int
    region_bound: Fraction  # largest admissible axis-shadow area


def _admissible_faces(problem: PlateauProblem) -> list[GridCell]:
    """Faces inside the working cube, nearest the curve first.

    The ordering is a deterministic search heuristic only; ascending-
    cardinality enumeration keeps the minimizer exact regardless.  Films
    hug their boundary curve, so candidates close to it come first and
    the first parity-feasible subset tends to pass the full check.
    """
    half = problem.cube_half
    grid = problem.grid
    out = []
    for cell in grid.cells(2):
        if all(
            all(abs(c) <= half for c in grid.world(corner)) for corner in cell.corners()
        ):
            out.append(cell)
    anchors = sorted(
        {grid.world(v) for c in problem.gamma.cells for v in _edge_ends(c)}
    )
    if not anchors:
        return sorted(out)

    eps = grid.epsilon

    def center_dist_sq(cell: GridCell) -> Fraction:
        center = list(grid.world(cell.base))
        for a in cell.axes:
            center[a] += eps / 2
        return min(
            sum((center[i] - p[i]) ** 2 for i in range(3)) for p in anchors
        )

    return sorted(out, key=lambda c: (center_dist_sq(c), c.base, c.axes))


def _axis_targets(problem: PlateauProblem) -> dict[int, frozenset]:
    targets = {}
    for axis in range(3):
        try:
            targets[axis] = region_cells(problem.gamma, axis)
        except ValueError:
            continue
    return targets


class _Found(Exception):
    pass


class _Search:
    """Ascending-cardinality subset search with parity-shadow pruning.

    State is one integer: a bit per (axis, column) that any candidate face
    or target region touches.  A face perpendicular to an admissible axis
    toggles exactly one bit, so the number of wrong bits is a lower bound
    on the faces still needed; bits no remaining face can reach prune the
    branch outright.
    """

    def __init__(self, problem: PlateauProblem, faces: list[GridCell], node_budget):
        self.problem = problem
        self.faces = faces
        self.node_budget = node_budget
        self.nodes = 0
        self.exhausted_cleanly = True
        self.best: Optional[tuple] = None

        targets = _axis_targets(problem)
        bit_of: dict = {}

        def bit(axis, column):
            key = (axis, column)
            if key not in bit_of:
                bit_of[key] = 1 << len(bit_of)
            return bit_of[key]

        self.target = 0
        for axis, cols in targets.items():
            for col in cols:
                self.target |= bit(axis, col)
        self.masks = []
        for cell in faces:
            axis = next(a for a in range(3) if a not in cell.axes)
            if axis in targets:
                j, l = cell.axes
                self.masks.append(bit(axis, (cell.base[j], cell.base[l])))
            else:
                self.masks.append(0)
        self.suffix = [0] * (len(faces) + 1)
        for i in range(len(faces) - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] | self.masks[i]

    def _full_check(self, chosen: list[GridCell]):
        problem = self.problem
        B = chain_of(problem.grid, 2, chosen)
        C = problem.gamma + boundary_grid(B)
        e = mass_grid(B) + mass_grid(C)
        if e > problem.lam:
            return None
        pair = Dipolyhedron(B, C)
        if not _support_in_cube(pair, problem.cube_half):
            return None
        if not spanning_check(pair, problem.gamma, problem.dirs).spans:
            return None
        return pair, e

    def run(self, max_faces: int):
        chosen: list[GridCell] = []

        def dfs(idx: int, left: int, state: int):
            self.nodes += 1
            if self.node_budget is not None and self.nodes > self.node_budget:
                self.exhausted_cleanly = False
                raise _Found
            wrong = state ^ self.target
            if left == 0:
                if wrong == 0:
                    hit = self._full_check(chosen)
                    if hit is not None:
                        self.best = hit
                        raise _Found
                return
            if len(self.faces) - idx < left:
                return
            if bin(wrong).count("1") > left:
                return
            if wrong & ~self.suffix[idx]:
                return
            chosen.append(self.faces[idx])
            dfs(idx + 1, left - 1, state ^ self.masks[idx])
            chosen.pop()
            dfs(idx + 1, left, state)

        for w in range(0, max_faces + 1):
            try:
                dfs(0, w, 0)
            except _Found:
                return
        return


def _zero_solution(problem: PlateauProblem, method: str) -> PlateauSolution:
    zero = Dipolyhedron(empty_chain(problem.grid, 2), empty_chain(problem.grid, 1))
    report = gamma_membership(zero, problem)
    return PlateauSolution(zero, Fraction(0), Fraction(0), report, "exact", method, 0, Fraction(0))


def _region_bound(problem: PlateauProblem) -> Fraction:
    eps2 = problem.grid.epsilon ** 2
    best = Fraction(0)
    for cols in _axis_targets(problem).values():
        best = max(best, eps2 * len(cols))
    return best


def _as_solution(problem, pair, e, optimality, method, nodes) -> PlateauSolution:
    report = gamma_membership(pair, problem)
    w = mass_grid(pair.B)
    bound = _region_bound(problem)
    if report.member:
        assert w >= bound, "weight fell below the projected-region area bound"
    return PlateauSolution(pair, w, Fraction(e), report, optimality, method, nodes, bound)


def minimize_weight(
    problem: PlateauProblem,
    method: str = "exhaustive",
    node_budget: Optional[int] = None,
    start: Optional[Dipolyhedron] = None,
) -> PlateauSolution:
    """Minimise the film weight over admissible grid pairs.

    "exhaustive" enumerates subsets of the admissible faces in ascending
    cardinality and returns the first feasible pair, which is therefore a
    proved minimiser.  "bnb" is the same search under a node budget
    (default 10^6); if the budget runs out, the cone start is returned as
    an upper bound.  "local" does seeded single-face descent from the
    cone start and always reports an upper bound.  When no admissible
    pair exists at all, raises BudgetError quoting the energy the cone
    start would need.
    """
    if method not in ("exhaustive", "bnb", "local"):
        raise ValueError(f"unknown method: {method}")
    if problem.gamma.is_zero():
        return _zero_solution(problem, method)

    if method == "local":
        return _local_descent(problem, start)

    faces = _admissible_faces(problem)
    if method == "exhaustive" and node_budget is None and len(faces) > 512:
        raise ValueError(
            f"{len(faces)} candidate faces is beyond the exhaustive budget; "
            "use method='bnb' or pass a node budget"
        )
    if method == "bnb" and node_budget is None:
        node_budget = 10 ** 6
    eps2 = problem.grid.epsilon ** 2
    max_faces = min(len(faces), int(problem.lam / eps2))
    search = _Search(problem, faces, node_budget)
    search.run(max_faces)

    if search.best is not None:
        status = "exact" if search.exhausted_cleanly else "upper-bound"
        pair, e = search.best
        return _as_solution(problem, pair, e, status, method, search.nodes)
    if search.exhausted_cleanly:
        raise BudgetError(
            "no admissible pair within the energy budget; "
            f"the cone start needs {float(cone_energy(problem.gamma)):.6g}",
            required=cone_energy(problem.gamma),
        )
    # budget ran out without a feasible pair: fall back to the cone start
    fallback = initial_cone_solution(problem).pair
    e = energy(fallback).energy
    return _as_solution(problem, fallback, e, "upper-bound", method, search.nodes)


def _local_descent(problem: PlateauProblem, start: Optional[Dipolyhedron]) -> PlateauSolution:
    if start is None:
        start = initial_cone_solution(problem).pair
    if not (is_grid_chain(start.B) and start.B.grid == problem.grid):
        raise ValueError("local search needs a grid pair on the problem grid")
    report = gamma_membership(start, problem)
    if not report.member:
        w = mass_grid(start.B)
        e = energy(start).energy
        return PlateauSolution(
            start, w, Fraction(e), report, "upper-bound", "local", 0, _region_bound(problem)
        )
    faces = _admissible_faces(problem)
    rng = random.Random(f"filmlab-plateau:{problem.seed}")
    order = list(range(len(faces)))
    current = set(start.B.cells)
    cur_w = mass_grid(start.B)
    cur_e = energy(start).energy
    nodes = 0
    improved = True
    while improved:
        improved = False
        rng.shuffle(order)
        for i in order:
            nodes += 1
            trial = set(current)
            trial ^= {faces[i]}
            B = chain_of(problem.grid, 2, trial)
            C = problem.gamma + boundary_grid(B)
            w = mass_grid(B)
            e = w + mass_grid(C)
            if (w, e) >= (cur_w, cur_e) or e > problem.lam:
                continue
            pair = Dipolyhedron(B, C)
            if not _support_in_cube(pair, problem.cube_half):
                continue
            if not spanning_check(pair, problem.gamma, problem.dirs).spans:
                continue
            current, cur_w, cur_e = trial, w, e
            improved = True
            break
    pair = Dipolyhedron(
        chain_of(problem.grid, 2, current),
        problem.gamma + boundary_grid(chain_of(problem.grid, 2, current)),
    )
    return _as_solution(problem, pair, cur_e, "upper-bound", "local", nodes)


# ---------------------------------------------------------------------------
# clamping


@dataclass(frozen=True)
class ClampReport:
    """Result of clamping a pair into the working cube."""

    pair: Dipolyhedron
    changed: bool
    weight_before: object
    weight_after: object
    energy_before: object
    energy_after: object
    weight_ok: bool
    energy_ok: bool
    spanning_before: SpanningReport
    spanning_after: SpanningReport

    @property
    def spanning_preserved(self) -> bool:
        return self.spanning_after.spans or not self.spanning_before.spans


def clamp_improvement(A: Dipolyhedron, problem: PlateauProblem) -> ClampReport:
    """Clamp the pair onto the working cube and audit the effect.

    Clamping is 1-Lipschitz, so weight and energy never increase; both
    are re-verified exactly.  Spanning is re-checked rather than assumed:
    the clamp can flatten film onto the cube walls and break a shadow
    match, so the report carries both verdicts.
    """
    gamma = problem.gamma
    curve = gamma if A.rep == "grid" else embed_grid_chain(gamma)
    before_split = energy(A)
    before_span = spanning_check(A, curve, problem.dirs)
    if _support_in_cube(A, problem.cube_half):
        return ClampReport(
            A,
            False,
            before_split.weight,
            before_split.weight,
            before_split.energy,
            before_split.energy,
            True,
            True,
            before_span,
            before_span,
        )
    clamped = clamp_dip(problem.cube_half, A)
    after_split = energy(clamped)
    after_span = spanning_check(clamped, embed_grid_chain(gamma), problem.dirs)
    return ClampReport(
        clamped,
        True,
        before_split.weight,
        after_split.weight,
        before_split.energy,
        after_split.energy,
        bool(after_split.weight <= before_split.weight),
        bool(after_split.energy <= before_split.energy),
        before_span,
        after_span,
    )


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class DiagnosticsReport:
    loops: tuple
    loop_count: int
    total_length: Fraction
    film_components: int
    has_film_curves: bool


def loop_decomposition(C: GridChain) -> list[list[GridCell]]:
    """Split a grid 1-cycle into edge-disjoint closed loops.

    Every vertex of a mod-2 cycle has even degree, so a walk that always
    leaves along the smallest unused edge can only get stuck back at its
    starting vertex; peeling such walks off one at a time uses every edge
    exactly once.
    """
    if C.k != 1:
        raise ValueError("loop decomposition expects a 1-chain")
    incident: dict = {}
    for cell in C.cells:
        for v in _edge_ends(cell):
            incident.setdefault(v, []).append(cell)
    for v, edges in incident.items():
        if len(edges) % 2:
            raise ValueError("chain is not a cycle: a vertex has odd degree")
    for edges in incident.values():
        edges.sort()
    unused = set(C.cells)
    loops = []
    for start_edge in sorted(C.cells):
        if start_edge not in unused:
            continue
        loop = []
        vertex = _edge_ends(start_edge)[0]
        here = vertex
        while True:
            edge = next(e for e in incident[here] if e in unused)
            unused.discard(edge)
            loop.append(edge)
            p, q = _edge_ends(edge)
            here = q if here == p else p
            if here == vertex:
                break
        loops.append(loop)
    return loops


def diagnostics(A: Dipolyhedron) -> DiagnosticsReport:
    """Loop structure of the mass part and connectivity of the film.

    Grid pairs only: loops are traced on the lattice graph, and film
    components are grown across shared edges.
    """
    if A.rep != "grid":
        raise ValueError("diagnostics expects a grid pair")
    loops = loop_decomposition(A.C)
    parent: dict = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    by_edge: dict = {}
    for face in A.B.cells:
        parent[face] = face
        for facet in face.facets():
            by_edge.setdefault(facet, []).append(face)
    for siblings in by_edge.values():
        for other in siblings[1:]:
            union(siblings[0], other)
    components = len({find(f) for f in A.B.cells})
    return DiagnosticsReport(
        tuple(tuple(loop) for loop in loops),
        len(loops),
        mass_grid(A.C),
        components,
        not A.C.is_zero(),
    )
