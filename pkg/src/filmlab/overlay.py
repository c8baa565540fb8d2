"""Geometric (almost-everywhere) equality of mod-2 chains.

Two presentations are equal as chains when their coverage parities agree
off a measure-zero set.  The exact decision reduces dimension by one twice:

* a 1-chain vanishes iff, on every carrying line, every elementary interval
  between breakpoints is covered evenly;
* a 2-chain vanishes iff, within every carrying plane, its parity function
  never jumps, i.e. the mod-2 overlay of all triangle edges vanishes as a
  1-chain (the jump set of a plane's parity function is exactly that
  overlay, and a jump-free parity vanishing at infinity is zero);
* a 3-chain vanishes iff the overlay of its tetrahedron faces vanishes as a
  2-chain, by the same jump argument in space.

This is sound and complete for rational inputs.  A sampled mode decides
parity agreement at seeded generic points instead; it is sound for
"unequal" and probabilistic for "equal", and exact mode falls back to it
beyond a configured presentation size.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .geom import (
    Point,
    Simplex,
    line_key,
    plane_key,
    vadd,
    vdot,
    vscale,
    vsub,
)
from .simplicial import SimplicialChain, boundary_simplicial, simplicial_chain

DEFAULT_MAX_EXACT = 20000
DEFAULT_TRIALS = 200


Segment = tuple[Point, Point]


def overlay_leftover(segments: Iterable[Segment]) -> list[Segment]:
    """Mod-2 geometric cancellation of segments: odd-covered sub-segments.

    Groups by carrying line, splits at all endpoints, and keeps elementary
    intervals with odd coverage, merging adjacent survivors.
    """
    groups: dict = {}
    for p, q in segments:
        if p == q:
            continue
        d, anchor = line_key(p, q)
        groups.setdefault((d, anchor), []).append((p, q))
    out: list[Segment] = []
    for (d, anchor), segs in sorted(groups.items()):
        df = (Fraction(d[0]), Fraction(d[1]), Fraction(d[2]))
        dd = vdot(df, df)

        def param(x: Point) -> Fraction:
            return vdot(vsub(x, anchor), df) / dd

        def at(t: Fraction) -> Point:
            return vadd(anchor, vscale(t, df))

        intervals = []
        for p, q in segs:
            t1, t2 = param(p), param(q)
            if t1 > t2:
                t1, t2 = t2, t1
            intervals.append((t1, t2))
        cuts = sorted({t for iv in intervals for t in iv})
        run_start = None
        prev_end = None
        for i in range(len(cuts) - 1):
            a, b = cuts[i], cuts[i + 1]
            mid = (a + b) / 2
            odd = sum(1 for t1, t2 in intervals if t1 < mid < t2) % 2 == 1
            if odd:
                if run_start is None:
                    run_start = a
                prev_end = b
            elif run_start is not None:
                out.append((at(run_start), at(prev_end)))
                run_start = None
        if run_start is not None:
            out.append((at(run_start), at(prev_end)))
    return out


def reduce_1chain(chain: SimplicialChain) -> SimplicialChain:
    """Minimal canonical presentation of a 1-chain (exact overlay)."""
    if chain.k != 1:
        raise ValueError("reduce_1chain expects a 1-chain")
    return simplicial_chain(1, overlay_leftover((s[0], s[1]) for s in chain.simplices))


def _plane_groups(chain: SimplicialChain) -> dict:
    groups: dict = {}
    for s in chain.simplices:
        key = plane_key(s[0], s[1], s[2])
        groups.setdefault(key, []).append(s)
    return groups


def is_zero_geometric(chain: SimplicialChain) -> bool:
    """Exact test that a chain's coverage parity vanishes a.e."""
    if chain.k <= 0:
        return chain.is_zero_presentation()
    if chain.k == 1:
        return not overlay_leftover((s[0], s[1]) for s in chain.simplices)
    if chain.k == 2:
        for _, tris in _plane_groups(chain).items():
            edges = []
            for t in tris:
                edges.extend(((t[0], t[1]), (t[0], t[2]), (t[1], t[2])))
            if overlay_leftover(edges):
                return False
        return True
    # k == 3: coverage jumps across faces
    return is_zero_geometric(boundary_simplicial(chain))


# -- point parity -----------------------------------------------------------

OUT, IN, ON = 0, 1, 2


def _point_segment_status(p: Point, s: Simplex) -> int:
    a, b = s
    ab = vsub(b, a)
    ap = vsub(p, a)
    if vdot(ab, ab) == 0:
        return OUT
    # collinearity
    from .geom import vcross

    if vcross(ab, ap) != (0, 0, 0):
        return OUT
    t = vdot(ap, ab) / vdot(ab, ab)
    if t < 0 or t > 1:
        return OUT
    if t == 0 or t == 1:
        return ON
    return IN


def _point_triangle_status(p: Point, s: Simplex) -> int:
    a, b, c = s
    from .geom import vcross

    n = vcross(vsub(b, a), vsub(c, a))
    if vdot(n, vsub(p, a)) != 0:
        return OUT
    v0 = vsub(b, a)
    v1 = vsub(c, a)
    v2 = vsub(p, a)
    d00 = vdot(v0, v0)
    d01 = vdot(v0, v1)
    d11 = vdot(v1, v1)
    d20 = vdot(v2, v0)
    d21 = vdot(v2, v1)
    denom = d00 * d11 - d01 * d01
    beta = (d11 * d20 - d01 * d21) / denom
    gamma = (d00 * d21 - d01 * d20) / denom
    alpha = 1 - beta - gamma
    coords = (alpha, beta, gamma)
    if any(c < 0 for c in coords):
        return OUT
    if any(c == 0 for c in coords):
        return ON
    return IN


def _point_tet_status(p: Point, s: Simplex) -> int:
    a = s[0]
    edges = [vsub(v, a) for v in s[1:]]
    mat = [[edges[j][i] for j in range(3)] for i in range(3)]

    def det3(mm):
        return (
            mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1])
            - mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0])
            + mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0])
        )

    d0 = det3(mat)
    if d0 == 0:
        return OUT
    rhs = vsub(p, a)
    coords = []
    for i in range(3):
        mm = [row[:] for row in mat]
        for r in range(3):
            mm[r][i] = rhs[r]
        coords.append(det3(mm) / d0)
    coords.append(1 - sum(coords))
    if any(c < 0 for c in coords):
        return OUT
    if any(c == 0 for c in coords):
        return ON
    return IN


def _point_status(p: Point, s: Simplex) -> int:
    k = len(s) - 1
    if k == 1:
        return _point_segment_status(p, s)
    if k == 2:
        return _point_triangle_status(p, s)
    return _point_tet_status(p, s)


class BoundaryHit(Exception):
    pass


def coverage_parity(p: Point, chain: SimplicialChain) -> int:
    """Parity of the number of simplices containing p; raises on boundary hits."""
    count = 0
    for s in chain.simplices:
        st = _point_status(p, s)
        if st == ON:
            raise BoundaryHit
        count += st
    return count % 2


# -- equality ---------------------------------------------------------------


@dataclass(frozen=True)
class EqualityCertificate:
    equal: bool
    mode: str  # exact | sampled | sampled-fallback
    trials: int = 0
    witness: Optional[Point] = None
    note: str = ""

    def __bool__(self) -> bool:
        return self.equal


def _sample_point(rng: random.Random, s: Simplex) -> Point:
    weights = [Fraction(rng.randint(1, 997)) for _ in s]
    total = sum(weights)
    acc = (Fraction(0), Fraction(0), Fraction(0))
    for w, v in zip(weights, s):
        acc = vadd(acc, vscale(w / total, v))
    return acc


def _sampled_equal(
    a: SimplicialChain, b: SimplicialChain, seed: int, trials: int, mode: str
) -> EqualityCertificate:
    diff = sorted(a.simplices ^ b.simplices)
    if not diff:
        return EqualityCertificate(True, mode, 0, note="identical presentations")
    rng = random.Random(f"filmlab-equal:{seed}")
    done = 0
    attempts = 0
    while done < trials and attempts < 50 * trials:
        attempts += 1
        s = diff[rng.randrange(len(diff))]
        p = _sample_point(rng, s)
        try:
            pa = coverage_parity(p, a)
            pb = coverage_parity(p, b)
        except BoundaryHit:
            continue
        if pa != pb:
            return EqualityCertificate(False, mode, done + 1, witness=p)
        done += 1
    return EqualityCertificate(True, mode, done, note="no disagreement found")


def chains_equal_mod2(
    a: SimplicialChain,
    b: SimplicialChain,
    mode: str = "exact",
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    max_exact: int = DEFAULT_MAX_EXACT,
) -> EqualityCertificate:
    """Decide geometric equality of two mod-2 chains.

    Exact mode is sound and complete up to ``max_exact`` presentation
    simplices in the symmetric difference, beyond which it falls back to
    sampling and says so in the certificate.
    """
    if a.k != b.k:
        raise ValueError("chains of different dimension")
    if mode == "sampled":
        return _sampled_equal(a, b, seed, trials, "sampled")
    if mode != "exact":
        raise ValueError(f"unknown equality mode: {mode}")
    diff = a + b
    if len(diff) > max_exact:
        cert = _sampled_equal(a, b, seed, trials, "sampled-fallback")
        note = f"exact size limit {max_exact} exceeded ({len(diff)}); " + cert.note
        return EqualityCertificate(cert.equal, cert.mode, cert.trials, cert.witness, note)
    return EqualityCertificate(is_zero_geometric(diff), "exact")
