import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmlab.overlay import (
    chains_equal_mod2,
    coverage_parity,
    is_zero_geometric,
    overlay_leftover,
    reduce_1chain,
)
from filmlab.simplicial import boundary_simplicial, simplicial_chain

from conftest import random_simplicial_chain

F = Fraction


def seg(a, b):
    return (
        tuple(F(x) for x in a),
        tuple(F(x) for x in b),
    )


def test_overlay_cancels_split_segment():
    # one long segment vs. the same segment in two halves
    whole = [seg((0, 0, 0), (2, 0, 0))]
    halves = [seg((0, 0, 0), (1, 0, 0)), seg((1, 0, 0), (2, 0, 0))]
    assert overlay_leftover(whole + halves) == []


def test_overlay_keeps_uncovered_part():
    left = overlay_leftover([seg((0, 0, 0), (2, 0, 0)), seg((0, 0, 0), (1, 0, 0))])
    assert left == [seg((1, 0, 0), (2, 0, 0))]


def test_overlay_triple_cover_parity():
    s = seg((0, 0, 0), (1, 0, 0))
    assert overlay_leftover([s, s, s]) == [s]


def test_reduce_1chain_canonicalizes():
    chain = simplicial_chain(
        1, [seg((0, 0, 0), (1, 0, 0)), seg((1, 0, 0), (2, 0, 0))]
    )
    reduced = reduce_1chain(chain)
    assert reduced.simplices == frozenset({seg((0, 0, 0), (2, 0, 0))})


def test_zero_geometric_across_presentations():
    # square split along the two different diagonals: equal as sets
    a = simplicial_chain(
        2,
        [
            (seg((0, 0, 0), (1, 0, 0)) + ((F(1), F(1), F(0)),)),
            (seg((0, 0, 0), (1, 1, 0)) + ((F(0), F(1), F(0)),)),
        ],
    )
    b = simplicial_chain(
        2,
        [
            (seg((0, 0, 0), (1, 0, 0)) + ((F(0), F(1), F(0)),)),
            (seg((1, 0, 0), (1, 1, 0)) + ((F(0), F(1), F(0)),)),
        ],
    )
    assert is_zero_geometric(a + b)
    cert = chains_equal_mod2(a, b, mode="exact")
    assert cert.equal and cert.mode == "exact"


def test_unequal_chains_detected():
    a = simplicial_chain(2, [(seg((0, 0, 0), (1, 0, 0)) + ((F(0), F(1), F(0)),))])
    b = simplicial_chain(2, [(seg((0, 0, 0), (1, 0, 0)) + ((F(0), F(0), F(1)),))])
    assert not chains_equal_mod2(a, b, mode="exact").equal
    assert not is_zero_geometric(a + b)


def test_coverage_parity_counts_mod2():
    tri1 = seg((0, 0, 0), (2, 0, 0)) + ((F(0), F(2), F(0)),)
    chain = simplicial_chain(2, [tri1])
    p = (F(1, 3), F(1, 3), F(0))
    assert coverage_parity(p, chain) == 1
    assert coverage_parity((F(5), F(5), F(0)), chain) == 0
    doubled = simplicial_chain(2, [tri1]) + simplicial_chain(2, [tri1])
    assert coverage_parity(p, doubled) == 0 if doubled.simplices else True


def test_sampled_mode_finds_witness():
    a = simplicial_chain(2, [(seg((0, 0, 0), (1, 0, 0)) + ((F(0), F(1), F(0)),))])
    b = simplicial_chain(2, [])
    b = simplicial_chain(2, [])
    cert = chains_equal_mod2(a, b, mode="sampled", trials=40)
    assert not cert.equal
    assert cert.witness is not None


def test_sampled_fallback_is_labelled():
    tri_whole = seg((0, 0, 0), (2, 0, 0)) + ((F(0), F(2), F(0)),)
    mid = (F(1), F(0), F(0))
    a = simplicial_chain(2, [tri_whole])
    b = simplicial_chain(
        2,
        [
            (tri_whole[0], mid, tri_whole[2]),
            (mid, tri_whole[1], tri_whole[2]),
        ],
    )
    assert chains_equal_mod2(a, b, mode="exact").equal
    cert = chains_equal_mod2(a, b, mode="exact", max_exact=1)
    assert cert.mode == "sampled-fallback"
    assert "exceeded" in cert.note
    assert cert.equal


def test_dimension_mismatch_raises():
    a = simplicial_chain(1, [seg((0, 0, 0), (1, 0, 0))])
    b = simplicial_chain(2, [])
    with pytest.raises(ValueError):
        chains_equal_mod2(a, b)


def test_zero_geometric_3chain_via_boundary():
    tet = simplicial_chain(
        3,
        [
            (
                (F(0), F(0), F(0)),
                (F(1), F(0), F(0)),
                (F(0), F(1), F(0)),
                (F(0), F(0), F(1)),
            )
        ],
    )
    assert not is_zero_geometric(tet)
    assert is_zero_geometric(tet + tet)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000), k=st.integers(1, 2))
def test_chain_equals_itself_re_presented(seed, k):
    chain = random_simplicial_chain(k, random.Random(seed))
    assert chains_equal_mod2(chain, chain, mode="exact").equal
    assert is_zero_geometric(chain + chain)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_boundary_of_boundary_zero_geometric(seed):
    chain = random_simplicial_chain(2, random.Random(seed))
    bb = boundary_simplicial(boundary_simplicial(chain))
    assert bb.is_zero_presentation()
