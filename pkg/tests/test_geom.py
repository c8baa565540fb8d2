from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmlab.geom import (
    Plane,
    is_degenerate,
    point_in_polygon_parity,
    point_simplex_dist_sq,
    polygon_is_simple,
    primitive_direction,
    shoelace_twice,
    simplex_measure,
    simplex_measure_sq,
    split_simplex,
    sup_norm,
    vcross,
    vdot,
)

F = Fraction
O = (F(0), F(0), F(0))
EX = (F(1), F(0), F(0))
EY = (F(0), F(1), F(0))
EZ = (F(0), F(0), F(1))


def test_measure_sq_edge_and_triangle():
    # squared measure carries the (k!)^2 Gram normalization
    assert simplex_measure_sq((O, EX)) == 1
    assert simplex_measure_sq((O, EX, EY)) == 1  # (2! * 1/2)^2
    assert simplex_measure((O, EX, EY)) * 2 == 1  # area 1/2 after /k!


def test_measure_scales_with_edge_length():
    long_edge = (O, (F(3), F(4), F(0)))
    assert simplex_measure_sq(long_edge) == 25
    assert simplex_measure(long_edge) == 5


def test_degenerate_simplices():
    assert is_degenerate((O, O))
    assert is_degenerate((O, EX, (F(2), F(0), F(0))))
    assert not is_degenerate((O, EX, EY))
    assert is_degenerate((O, EX, EY, (F(1), F(1), F(0))))


def test_primitive_direction_normalizes():
    assert primitive_direction((F(2), F(-4), F(6))) == (1, -2, -3) or \
        primitive_direction((F(2), F(-4), F(6))) == (-1, 2, -3) or \
        primitive_direction((F(2), F(-4), F(6))) == (1, -2, 3)
    # same line, opposite directions agree
    a = primitive_direction((F(2), F(-4), F(6)))
    b = primitive_direction((F(-2), F(4), F(-6)))
    assert a == b


def test_point_simplex_distance():
    tri = (O, EX, EY)
    assert point_simplex_dist_sq((F(1, 4), F(1, 4), F(0)), tri) == 0
    assert point_simplex_dist_sq((F(1, 4), F(1, 4), F(2)), tri) == 4
    assert point_simplex_dist_sq((F(2), F(0), F(0)), tri) == 1
    edge = (O, EX)
    assert point_simplex_dist_sq((F(1, 2), F(3), F(4)), edge) == 25
    assert point_simplex_dist_sq((F(-3), F(0), F(4)), edge) == 25


def test_split_simplex_partitions_measure():
    tri = (O, (F(2), F(0), F(0)), (F(0), F(2), F(0)))
    plane = Plane((F(1), F(0), F(0)), F(1))
    neg, on, pos = split_simplex(tri, plane)
    total = sum(simplex_measure(s) for s in neg + on + pos)
    assert total == simplex_measure(tri)
    assert all(plane.eval(v) <= 0 for s in neg for v in s)
    assert all(plane.eval(v) >= 0 for s in pos for v in s)
    assert neg and pos


def test_split_simplex_keeps_coplanar_pieces():
    tri = (O, EX, EY)
    plane = Plane((F(0), F(0), F(1)), F(0))
    neg, on, pos = split_simplex(tri, plane)
    assert on == [tri] and not neg and not pos


def test_plane_through_rejects_degenerate():
    with pytest.raises(ValueError):
        Plane.through(O, EX, (F(2), F(0), F(0)))


def test_sup_norm():
    assert sup_norm((F(-3), F(2), F(1, 2))) == 3


def test_shoelace_and_parity():
    square = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]
    assert abs(shoelace_twice(square)) == 2
    assert polygon_is_simple(square)
    assert point_in_polygon_parity((F(1, 2), F(1, 2)), square)
    assert not point_in_polygon_parity((F(3, 2), F(1, 2)), square)
    bowtie = [(F(0), F(0)), (F(1), F(1)), (F(1), F(0)), (F(0), F(1))]
    assert not polygon_is_simple(bowtie)


@st.composite
def points(draw, span=3, den=4):
    f = st.fractions(min_value=-span, max_value=span, max_denominator=den)
    return (draw(f), draw(f), draw(f))


@settings(max_examples=40, deadline=None)
@given(a=points(), b=points(), c=points(), n=points(), b0=st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_split_preserves_measure_random(a, b, c, n, b0):
    if is_degenerate((a, b, c)) or n == (0, 0, 0):
        return
    plane = Plane(n, b0)
    neg, on, pos = split_simplex((a, b, c), plane)
    total = sum(simplex_measure(s) for s in neg + on + pos)
    assert total == simplex_measure((a, b, c))


@settings(max_examples=40, deadline=None)
@given(a=points(), b=points(), p=points())
def test_point_segment_distance_bounds(a, b, p):
    if a == b:
        return
    d2 = point_simplex_dist_sq(p, (a, b))
    for end in (a, b):
        gap = tuple(x - y for x, y in zip(p, end))
        assert d2 <= vdot(gap, gap)
    assert d2 >= 0


def test_cross_orthogonality():
    n = vcross(EX, EY)
    assert n == EZ
    assert vdot(n, EX) == 0 and vdot(n, EY) == 0
