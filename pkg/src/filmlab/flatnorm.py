"""Exact flat-norm style relaxations on grid chains.

flat_norm minimizes M(Q) + M(R) over decompositions P = Q + boundary(R);
energy_flat_norm does the same for pairs, with the film allowed to trade
against mass one dimension down.  Both search the GF(2) cube of free
relaxation cells: exhaustively (vectorized, exact) when small enough, or
by branch-and-bound with a node budget and an honest "upper-bound"
status when the budget runs out before the gap closes.

Scores are integers throughout: every cell mass is a power of the grid
pitch, so scaling by a common denominator makes comparisons exact and
lets the exhaustive scan run on machine integers.

natural_norm_upper estimates the translation-structured norm by
repeatedly pairing translate pieces into multicells; it never explores
the boundary freedom (C = 0), so for r >= 1 it reports an upper bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .exact import RadicalSum
from .dipolyhedra import Dipolyhedron, chain_boundary
from .grid import GridCell, GridChain, GridSpec, boundary_grid, chain_of, empty_chain, mass_grid

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SolverConfig:
    exhaustive_limit: int = 24
    node_budget: int = 1_000_000
    chunk_bits: int = 20


DEFAULT_CONFIG = SolverConfig()


# ---------------------------------------------------------------------------
# GF(2) minimum-weight engine
#
# State: an integer bit vector over "universe" cells, starting at `base`;
# choosing free variable i XORs `effects[i]` into the state and pays
# `own[i]`.  The final score adds `bit_weights[b]` for every set state
# bit.  Ties between optimal choices go to the smallest variable mask
# (bit i of the mask is variable i in canonical order).

@dataclass
class _Problem:
    base: int
    effects: list
    own: list
    weight_masks: list  # (integer weight, universe bitmask) pairs


def _lanes_of(value: int, lanes: int) -> list[int]:
    return [(value >> (64 * i)) & _MASK64 for i in range(lanes)]


def _weighted_popcount(x: int, weight_masks) -> int:
    return sum(w * (x & m).bit_count() for w, m in weight_masks)


def _solve_exhaustive(problem: _Problem, chunk_bits: int) -> tuple[int, int, str]:
    n = len(problem.effects)
    relevant = [problem.base, *problem.effects] + [m for _, m in problem.weight_masks]
    maxbit = max((v.bit_length() for v in relevant), default=0)
    lanes = max(1, (maxbit + 63) // 64)

    low = min(n, chunk_bits)
    table = np.zeros((1 << low, lanes), dtype=np.uint64)
    owns = np.zeros(1 << low, dtype=np.int64)
    table[0] = np.array(_lanes_of(problem.base, lanes), dtype=np.uint64)
    for i in range(low):
        sz = 1 << i
        table[sz : 2 * sz] = table[:sz] ^ np.array(
            _lanes_of(problem.effects[i], lanes), dtype=np.uint64
        )
        owns[sz : 2 * sz] = owns[:sz] + problem.own[i]
    lane_masks = [
        (w, np.array(_lanes_of(m, lanes), dtype=np.uint64)) for w, m in problem.weight_masks
    ]

    best_score = None
    best_mask = 0
    for high in range(1 << (n - low)):
        hx = 0
        ho = 0
        for i in range(n - low):
            if (high >> i) & 1:
                hx ^= problem.effects[low + i]
                ho += problem.own[low + i]
        block = table ^ np.array(_lanes_of(hx, lanes), dtype=np.uint64)
        score = owns + np.int64(ho)
        for w, marr in lane_masks:
            score = score + np.int64(w) * np.bitwise_count(block & marr).sum(
                axis=1, dtype=np.int64
            )
        idx = int(np.argmin(score))
        s = int(score[idx])
        # within a block, argmin's first hit is the smallest variable mask
        if best_score is None or s < best_score:
            best_score = s
            best_mask = (high << low) | idx
    return best_mask, best_score, "exact"


def _solve_bnb(problem: _Problem, node_budget: int) -> tuple[int, int, str]:
    n = len(problem.effects)
    universe = 0
    for _, m in problem.weight_masks:
        universe |= m
    last_touch: dict[int, int] = {}
    for i, eff in enumerate(problem.effects):
        rem = eff & universe
        while rem:
            b = rem & -rem
            last_touch[b.bit_length() - 1] = i
            rem ^= b
    decided_after = [0] * n
    root_decided = 0
    rem = universe
    while rem:
        b = rem & -rem
        bit = b.bit_length() - 1
        if bit in last_touch:
            decided_after[last_touch[bit]] |= b
        else:
            root_decided |= b
        rem ^= b
    def sectioned(m):
        return [(w, wm & m) for w, wm in problem.weight_masks]

    decided_masks = [sectioned(m) for m in decided_after]

    best_score = None
    best_mask = 0
    nodes = 0
    exhausted = False
    root_lb = _weighted_popcount(problem.base, sectioned(root_decided))
    stack = [(0, problem.base, root_lb, 0)]
    while stack:
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            break
        depth, state, lb, mask = stack.pop()
        if best_score is not None and lb > best_score:
            continue
        if depth == n:
            if best_score is None or lb < best_score or (lb == best_score and mask < best_mask):
                best_score = lb
                best_mask = mask
            continue
        for bit in (1, 0):  # LIFO: the 0 branch is explored first
            state2 = state ^ (problem.effects[depth] if bit else 0)
            lb2 = lb + (problem.own[depth] if bit else 0)
            lb2 += _weighted_popcount(state2, decided_masks[depth])
            stack.append((depth + 1, state2, lb2, mask | (bit << depth)))
    if best_score is None:
        # budget too small to reach any leaf: fall back to the empty choice
        state = problem.base
        best_score = _weighted_popcount(state, problem.weight_masks)
        best_mask = 0
        exhausted = True
    return best_mask, best_score, "upper-bound" if exhausted else "exact"


def _solve(problem: _Problem, method: str, config: SolverConfig) -> tuple[int, int, str]:
    n = len(problem.effects)
    if method == "exhaustive":
        if n > config.exhaustive_limit:
            raise ValueError(
                f"{n} free cells exceed the exhaustive limit "
                f"{config.exhaustive_limit}; use method='bnb'"
            )
        return _solve_exhaustive(problem, config.chunk_bits)
    if method == "bnb":
        return _solve_bnb(problem, config.node_budget)
    raise ValueError(f"unknown method: {method}")


def _chosen(cells: Sequence[GridCell], mask: int) -> list[GridCell]:
    return [c for i, c in enumerate(cells) if (mask >> i) & 1]


# ---------------------------------------------------------------------------
# flat norm

@dataclass(frozen=True)
class FlatNormCertificate:
    value: Fraction
    Q: GridChain
    R: GridChain
    status: str


def flat_norm(
    P: GridChain, method: str = "exhaustive", config: SolverConfig = DEFAULT_CONFIG
) -> FlatNormCertificate:
    """Minimal M(Q) + M(R) with P = Q + boundary(R) over grid chains.

    Exhaustive search scans every subset of the grid's (k+1)-cells and
    is exact; branch-and-bound prunes with the mass of already-decided
    cells and reports an upper bound if its node budget runs out.
    """
    k = P.k
    if not 0 <= k <= 2:
        raise ValueError("flat norm needs relaxation cells one dimension up (k <= 2)")
    grid = P.grid
    free = sorted(grid.cells(k + 1))
    p, q = grid.epsilon.numerator, grid.epsilon.denominator

    universe: dict[GridCell, int] = {}

    def bit_of(cell: GridCell) -> int:
        return universe.setdefault(cell, len(universe))

    base = 0
    for cell in sorted(P.cells):
        base |= 1 << bit_of(cell)
    effects = []
    for cell in free:
        eff = 0
        for facet in cell.facets():
            eff ^= 1 << bit_of(facet)
        effects.append(eff)
    q_weight = q  # epsilon^k scaled by q^(k+1)/p^k
    r_cost = p
    weight_masks = [(q_weight, (1 << len(universe)) - 1)]
    problem = _Problem(base, effects, [r_cost] * len(free), weight_masks)

    mask, score, status = _solve(problem, method, config)
    R = chain_of(grid, k + 1, _chosen(free, mask))
    Q = P + boundary_grid(R)
    value = mass_grid(Q) + mass_grid(R)
    if status == "exact" and value != Fraction(score * p**k, q ** (k + 1)):
        raise AssertionError("solver score does not match the rebuilt certificate")
    cert = FlatNormCertificate(value, Q, R, status)
    if not verify_certificate(cert, P):
        raise AssertionError("flat norm certificate failed replay")
    return cert


# ---------------------------------------------------------------------------
# energy flat norm

@dataclass(frozen=True)
class EnergyFlatCertificate:
    value: Fraction
    B_Q: GridChain
    C_Q: GridChain
    B_R: GridChain
    C_R: GridChain
    status: str


def energy_flat_norm(
    A: Dipolyhedron, method: str = "exhaustive", config: SolverConfig = DEFAULT_CONFIG
) -> EnergyFlatCertificate:
    """Minimal E(Q) + E(R) with B = B_Q + bd(B_R) + C_R, C = C_Q + bd(C_R).

    Free variables are the film relaxation cells B_R ((k+1)-cells, when
    k < 3) and the mass relaxation cells C_R (k-cells); the Q parts are
    forced by the two GF(2) identities.
    """
    if A.rep != "grid":
        raise ValueError("the energy flat norm solver works on grid pairs")
    k = A.k
    if not 0 <= k <= 2:
        raise ValueError("energy flat norm needs film relaxation cells (k <= 2)")
    grid = A.B.grid
    p, q = grid.epsilon.numerator, grid.epsilon.denominator
    lowp = max(k - 1, 0)

    def scaled(j: int) -> int:
        return p ** (j - lowp) * q ** (k + 1 - j)

    free_br = sorted(grid.cells(k + 1))
    free_cr = sorted(grid.cells(k))
    n_total = len(free_br) + len(free_cr)

    film_bits: dict[GridCell, int] = {}
    mass_bits: dict[GridCell, int] = {}
    counter = [0]

    def bit_of(table: dict, cell: GridCell) -> int:
        if cell not in table:
            table[cell] = counter[0]
            counter[0] += 1
        return table[cell]

    base = 0
    for cell in sorted(A.B.cells):
        base |= 1 << bit_of(film_bits, cell)
    for cell in sorted(A.C.cells):
        base |= 1 << bit_of(mass_bits, cell)
    effects = []
    own = []
    for cell in free_br:
        eff = 0
        for facet in cell.facets():
            eff ^= 1 << bit_of(film_bits, facet)
        effects.append(eff)
        own.append(scaled(k + 1))
    for cell in free_cr:
        eff = 1 << bit_of(film_bits, cell)
        if k >= 1:
            for facet in cell.facets():
                eff ^= 1 << bit_of(mass_bits, facet)
        effects.append(eff)
        own.append(scaled(k))

    film_mask = 0
    for b in film_bits.values():
        film_mask |= 1 << b
    mass_mask = 0
    for b in mass_bits.values():
        mass_mask |= 1 << b
    weight_masks = [(scaled(k), film_mask)]
    if mass_mask:
        weight_masks.append((scaled(k - 1), mass_mask))
    problem = _Problem(base, effects, own, weight_masks)
    if method == "exhaustive" and n_total > config.exhaustive_limit:
        raise ValueError(
            f"{n_total} free cells exceed the exhaustive limit "
            f"{config.exhaustive_limit}; use method='bnb'"
        )
    mask, score, status = _solve(problem, method, config)

    br_mask = mask & ((1 << len(free_br)) - 1)
    cr_mask = mask >> len(free_br)
    B_R = chain_of(grid, k + 1, _chosen(free_br, br_mask))
    C_R = chain_of(grid, k, _chosen(free_cr, cr_mask))
    B_Q = A.B + boundary_grid(B_R) + C_R
    C_Q = A.C + chain_boundary(C_R)
    value = mass_grid(B_Q) + mass_grid(C_Q) + mass_grid(B_R) + mass_grid(C_R)
    if status == "exact" and value != Fraction(score * p**lowp, q ** (k + 1)):
        raise AssertionError("solver score does not match the rebuilt certificate")
    cert = EnergyFlatCertificate(value, B_Q, C_Q, B_R, C_R, status)
    if not verify_certificate(cert, A):
        raise AssertionError("energy flat norm certificate failed replay")
    return cert


# ---------------------------------------------------------------------------
# multicells and the natural-norm upper estimator

def _translate_cell(cell: GridCell, v: tuple[int, int, int]) -> GridCell:
    base = (cell.base[0] + v[0], cell.base[1] + v[1], cell.base[2] + v[2])
    return GridCell(base, cell.axes)


@dataclass(frozen=True)
class Multicell:
    """A cell XORed with its translates: level j uses vectors v1..vj."""

    base: GridCell
    vectors: tuple[tuple[int, int, int], ...]

    @property
    def level(self) -> int:
        return len(self.vectors)

    def expansion(self) -> frozenset:
        cells: set[GridCell] = set()
        for subset in range(1 << len(self.vectors)):
            shift = (0, 0, 0)
            for i, v in enumerate(self.vectors):
                if (subset >> i) & 1:
                    shift = (shift[0] + v[0], shift[1] + v[1], shift[2] + v[2])
            cells ^= {_translate_cell(self.base, shift)}
        return frozenset(cells)

    def cost(self, grid: GridSpec) -> RadicalSum:
        total = RadicalSum.from_fraction(grid.cell_mass(self.base.dim))
        eps_sq = grid.epsilon * grid.epsilon
        for v in self.vectors:
            total = total * RadicalSum.sqrt(eps_sq * (v[0] ** 2 + v[1] ** 2 + v[2] ** 2))
        return total


@dataclass(frozen=True)
class MulticellDecomposition:
    levels: tuple  # levels[j] = tuple of level-j multicells
    C: GridChain
    cost: RadicalSum
    status: str


def _compatible_translation(a: Multicell, b: Multicell) -> Optional[tuple[int, int, int]]:
    if a.vectors != b.vectors or a.base.axes != b.base.axes:
        return None
    v = (
        b.base.base[0] - a.base.base[0],
        b.base.base[1] - a.base.base[1],
        b.base.base[2] - a.base.base[2],
    )
    return v if v != (0, 0, 0) else None


def _pair_level(pieces, radius: int, grid: GridSpec):
    """One keep-or-merge round: pair translate pieces into multicells."""
    costs = [mc.cost(grid) for mc, _ in pieces]
    pair_options = {}
    for i in range(len(pieces)):
        for l in range(i + 1, len(pieces)):
            v = _compatible_translation(pieces[i][0], pieces[l][0])
            if v is None or v[0] ** 2 + v[1] ** 2 + v[2] ** 2 > radius * radius:
                continue
            merged = Multicell(pieces[i][0].base, pieces[i][0].vectors + (v,))
            pair_options[(i, l)] = (merged, merged.cost(grid))

    n = len(pieces)
    if n <= 12:
        plan = _pairing_dp(n, costs, pair_options)
    else:
        plan = _pairing_greedy(n, costs, pair_options)

    out = []
    used = set()
    for i, l in plan:
        merged, _ = pair_options[(i, l)]
        cells = pieces[i][1] | pieces[l][1]
        if len(cells) != len(pieces[i][1]) + len(pieces[l][1]):
            raise AssertionError("translate pieces must be disjoint")
        out.append((merged, frozenset(cells)))
        used.update((i, l))
    for i in range(n):
        if i not in used:
            out.append(pieces[i])
    out.sort(key=lambda piece: sorted(piece[1]))
    return out


def _pairing_dp(n: int, costs, pair_options):
    best: dict[int, tuple] = {0: (RadicalSum.zero(), ())}

    def solve(mask: int):
        if mask in best:
            return best[mask]
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        cost, plan = solve(rest)
        answer = (cost + costs[i], plan)
        for l in range(i + 1, n):
            if not (mask >> l) & 1 or (i, l) not in pair_options:
                continue
            sub_cost, sub_plan = solve(rest ^ (1 << l))
            cand = (sub_cost + pair_options[(i, l)][1], sub_plan + ((i, l),))
            if cand[0] < answer[0]:
                answer = cand
        best[mask] = answer
        return answer

    return solve((1 << n) - 1)[1]


def _pairing_greedy(n: int, costs, pair_options):
    plan = []
    used = set()
    for (i, l), (_, merged_cost) in sorted(pair_options.items()):
        if i in used or l in used:
            continue
        if merged_cost < costs[i] + costs[l]:
            plan.append((i, l))
            used.update((i, l))
    return tuple(plan)


def natural_norm_upper(
    P: GridChain, r: int, translation_radius: int = 2
) -> MulticellDecomposition:
    """Translation-structured cost bound: pair pieces into multicells.

    Level 0 is exactly M(P).  Each further level may merge a piece with
    a lattice translate of itself (|v| <= translation_radius cells) at
    cost M(base)*|v1|*..*|vj|.  The boundary freedom stays unused, and
    translations stay on the lattice, so for r >= 1 the result is an
    upper bound on the translation-structured infimum, never claimed
    exact.  Costs are monotone in r by construction.
    """
    if not 0 <= P.k <= 2:
        raise ValueError("the estimator keeps C one dimension up; k <= 2 only")
    if not 0 <= r <= 3:
        raise ValueError("levels r in 0..3")
    pieces = [(Multicell(cell, ()), frozenset({cell})) for cell in sorted(P.cells)]
    for _ in range(r):
        pieces = _pair_level(pieces, translation_radius, P.grid)
    levels = tuple(
        tuple(mc for mc, _ in pieces if mc.level == j) for j in range(r + 1)
    )
    cost = RadicalSum.zero()
    for mc, _ in pieces:
        cost = cost + mc.cost(P.grid)
    status = "exact" if r == 0 else "upper-bound"
    return MulticellDecomposition(levels, empty_chain(P.grid, P.k + 1), cost, status)


# ---------------------------------------------------------------------------
# certificate replay

def verify_certificate(cert, original) -> bool:
    """Replay a certificate's identities and value, independent of solvers."""
    try:
        if isinstance(cert, FlatNormCertificate):
            P = original
            if cert.Q.k != P.k or cert.R.k != P.k + 1 or cert.Q.grid != P.grid:
                return False
            if not (P + cert.Q + boundary_grid(cert.R)).is_zero():
                return False
            return cert.value == mass_grid(cert.Q) + mass_grid(cert.R) and cert.value >= 0
        if isinstance(cert, EnergyFlatCertificate):
            A = original
            film = A.B + cert.B_Q + chain_boundary(cert.B_R) + cert.C_R
            if not film.is_zero():
                return False
            mass = A.C + cert.C_Q + chain_boundary(cert.C_R)
            if not mass.is_zero():
                return False
            total = (
                mass_grid(cert.B_Q)
                + mass_grid(cert.C_Q)
                + mass_grid(cert.B_R)
                + mass_grid(cert.C_R)
            )
            return cert.value == total and cert.value >= 0
        if isinstance(cert, MulticellDecomposition):
            P = original
            cells: set[GridCell] = set()
            cost = RadicalSum.zero()
            for level in cert.levels:
                for mc in level:
                    cells ^= mc.expansion()
                    cost = cost + mc.cost(P.grid)
            cells ^= set(chain_boundary(cert.C).cells) if cert.C.k >= 1 else set()
            if frozenset(cells) != P.cells:
                return False
            return cost == cert.cost
    except (ValueError, AttributeError):
        return False
    return False
