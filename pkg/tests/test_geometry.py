import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from equidecomp.errors import DegenerateTriangle, InvalidPolygon, NotUnimodular
from equidecomp.geometry import (
    GMap,
    Location,
    OrientedSegment,
    Point,
    Polygon,
    Triangle,
    gmap_apply,
    gmap_compose,
    gmap_invert,
    is_minimal_segment,
    is_minimal_triangle,
    lattice_points_on_segment,
    point,
    point_location,
    polygon,
    polygon_area,
    primitivity_level,
    random_gmap,
)

SQUARE = polygon((0, 0), (1, 0), (1, 1), (0, 1))


def seg(a, b):
    return OrientedSegment(point(*a), point(*b))


@st.composite
def gmaps(draw, bound=5):
    return random_gmap(random.Random(draw(st.integers(0, 10**9))), bound)


@st.composite
def points(draw, max_den=8):
    d = draw(st.integers(1, max_den))
    return Point(F(draw(st.integers(-3 * d, 3 * d)), d), F(draw(st.integers(-3 * d, 3 * d)), d))


def test_gmap_apply_examples():
    assert gmap_apply(GMap.identity(), point("1/2", "1/3")) == point("1/2", "1/3")
    swap = GMap(((0, 1), (1, 0)), (0, 0))
    assert swap(point("1/3", 0)) == point(0, "1/3")
    shear = GMap(((1, 1), (0, 1)), (1, 0))
    assert shear(point("1/2", "1/2")) == point(2, "1/2")


def test_gmap_compose_and_invert_examples():
    g = GMap(((2, 1), (1, 1)), (3, -1))
    assert gmap_compose(GMap.identity(), g) == g
    assert gmap_invert(GMap.identity()) == GMap.identity()
    assert gmap_invert(GMap(((1, 1), (0, 1)), (0, 0))) == GMap(((1, -1), (0, 1)), (0, 0))


def test_gmap_rejects_non_unimodular():
    with pytest.raises(NotUnimodular):
        GMap(((2, 0), (0, 1)), (0, 0))


@settings(max_examples=200)
@given(gmaps(), gmaps(), gmaps(), points())
def test_gmap_group_laws(f, g, h, p):
    assert f.compose(g).compose(h) == f.compose(g.compose(h))
    assert f.compose(f.inverse()).is_identity
    assert f.inverse().compose(f)(p) == p
    assert f.compose(g)(p) == f(g(p))


def test_primitivity_level_examples():
    assert primitivity_level(point(0, 0)) == 1
    assert primitivity_level(point("1/2", "1/3")) == 6
    assert primitivity_level(point("2/4", 0)) == 2


@settings(max_examples=300)
@given(gmaps(), points())
def test_primitivity_level_is_invariant(g, p):
    assert primitivity_level(g(p)) == primitivity_level(p)


def test_point_location_examples():
    assert point_location(SQUARE, point("1/2", "1/2")) is Location.INTERIOR
    assert point_location(SQUARE, point(0, "1/2")) is Location.BOUNDARY
    assert point_location(SQUARE, point(2, 0)) is Location.OUTSIDE


def test_point_location_nonconvex():
    L = polygon((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))
    assert L.locate(point("3/2", "3/2")) is Location.OUTSIDE
    assert L.locate(point("1/2", "3/2")) is Location.INTERIOR
    assert L.locate(point(1, "3/2")) is Location.BOUNDARY


def test_minimal_segment_examples():
    assert is_minimal_segment(seg((0, 0), ("1/3", 0)), 3)
    assert not is_minimal_segment(seg((0, 0), ("2/3", 0)), 3)
    assert is_minimal_segment(seg((0, 0), (1, 1)), 1)


def test_minimal_triangle_examples():
    assert is_minimal_triangle(Triangle(point(0, 0), point("1/2", 0), point(0, "1/2")), 2)
    assert not is_minimal_triangle(Triangle(point(0, 0), point(1, 0), point(0, 1)), 2)
    assert is_minimal_triangle(Triangle(point(0, 0), point(1, 0), point(0, 1)), 1)


def test_lattice_points_on_segment():
    pts = lattice_points_on_segment(point(0, 0), point(1, 1), 2)
    assert pts == [point(0, 0), point("1/2", "1/2"), point(1, 1)]


@settings(max_examples=200)
@given(gmaps(), st.integers(1, 8), st.integers(0, 10**6))
def test_minimality_preserved_by_gmaps(g, d, s):
    rng = random.Random(s)
    pts = [Point(F(rng.randint(-2 * d, 2 * d), d), F(rng.randint(-2 * d, 2 * d), d)) for _ in range(3)]
    try:
        T = Triangle(*pts)
    except DegenerateTriangle:
        return
    assert is_minimal_triangle(T, d) == is_minimal_triangle(T.mapped(g), d)
    E = OrientedSegment(pts[0], pts[1])
    assert is_minimal_segment(E, d) == is_minimal_segment(E.mapped(g), d)


def test_triangle_normalisation_and_degeneracy():
    T = Triangle(point(0, 1), point(1, 0), point(0, 0))
    assert T.vertices == (point(0, 0), point(1, 0), point(0, 1))
    assert T.area == F(1, 2)
    with pytest.raises(DegenerateTriangle):
        Triangle(point(0, 0), point(1, 1), point(2, 2))


def test_polygon_orientation_and_validation():
    cw = Polygon(tuple(reversed(SQUARE.vertices)))
    assert cw.area == 1
    assert polygon_area(cw) == 1
    with pytest.raises(InvalidPolygon):
        polygon((0, 0), (1, 1), (1, 0), (0, 1))  # bow tie
    with pytest.raises(InvalidPolygon):
        polygon((0, 0), (1, 0))


@settings(max_examples=100)
@given(gmaps())
def test_area_positive_and_invariant(g):
    L = polygon((0, 0), (2, 0), (2, 1), (1, 1), ("1/2", "3/2"), (0, 2))
    assert L.area > 0
    assert L.mapped(g).area == L.area
