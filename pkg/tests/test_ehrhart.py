import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from equidecomp.errors import LevelMismatch
from equidecomp.ehrhart import (
    QuasiPolynomial,
    count_lattice_points,
    count_lattice_points_brute,
    ehrhart_quasipolynomial,
    map_primitive_point,
    primitive_census,
    primitive_count,
    primitive_count_brute,
    vertex_compatible,
)
from equidecomp.geometry import GMap, point, polygon, primitivity_level, random_gmap
from equidecomp.synthesize import random_polygon
from equidecomp.weights import divisors

SQUARE = polygon((0, 0), (1, 0), (1, 1), (0, 1))
SIMPLEX = polygon((0, 0), (1, 0), (0, 1))
HALF = polygon((0, 0), ("1/2", 0), (0, "1/2"))


def test_counts_examples():
    assert count_lattice_points(SQUARE, 2) == 9
    assert count_lattice_points(SIMPLEX, 3) == 10
    assert count_lattice_points(HALF, 1) == 1
    assert count_lattice_points(HALF, 3) == 3


def test_square_and_simplex():
    qp = ehrhart_quasipolynomial(SQUARE)
    assert all(c == (1, 2, 1) for c in qp.constituents)
    qp = ehrhart_quasipolynomial(SIMPLEX)
    assert all(c == (1, F(3, 2), F(1, 2)) for c in qp.constituents)


def test_half_simplex_constituents():
    qp = ehrhart_quasipolynomial(HALF)
    assert qp.period == 2 and qp.minimal_period() == 2
    for t in range(1, 13):
        want = F(t * t + 6 * t + 8, 8) if t % 2 == 0 else F((t + 1) * (t + 3), 8)
        assert qp(t) == want == count_lattice_points_brute(HALF, t)


def test_quasipolynomial_equality_over_common_period():
    a = QuasiPolynomial(1, ((1, 2, 1),))
    b = QuasiPolynomial(2, ((1, 2, 1), (1, 2, 1)))
    assert a.agrees_with(b) and b.minimal_period() == 1
    assert not a.agrees_with(QuasiPolynomial(1, ((1, 2, 2),)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4))
def test_sweep_matches_brute(s, d):
    rng = random.Random(s)
    P = random_polygon(rng, d, size=2, max_vertices=7)
    for t in range(1, 7):
        assert count_lattice_points(P, t) == count_lattice_points_brute(P, t)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4))
def test_quasipolynomial_shape_and_invariance(s, d):
    rng = random.Random(s)
    P = random_polygon(rng, d, size=2, max_vertices=6)
    qp = ehrhart_quasipolynomial(P)
    assert all(c[2] == P.area for c in qp.constituents)
    for t in range(1, 3 * d + 1):
        assert qp(t) == count_lattice_points_brute(P, t)
    g = random_gmap(rng, 5)
    assert ehrhart_quasipolynomial(P.mapped(g)).agrees_with(qp)
    assert vertex_compatible(P, P.mapped(g))


def test_parallel_sampling_agrees():
    P = polygon((0, 0), ("5/3", 0), (1, "4/3"), ("1/3", "2/3"))
    assert ehrhart_quasipolynomial(P, workers=2) == ehrhart_quasipolynomial(P)


def test_primitive_count_examples():
    assert [primitive_count(SQUARE, n) for n in (1, 2, 3)] == [4, 5, 12]
    assert primitive_census(SQUARE, 3) == {1: 4, 2: 5, 3: 12}


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 4))
def test_divisor_sum_identity(s, d):
    P = random_polygon(random.Random(s), d, size=2, max_vertices=6)
    census = primitive_census(P, 12)
    for N in range(1, 13):
        assert count_lattice_points(P, N) == sum(census[n] for n in divisors(N))
    for n in (1, 2, 3, 4, 6):
        assert census[n] == primitive_count(P, n) == primitive_count_brute(P, n)


def test_vertex_compatibility_examples():
    assert vertex_compatible(HALF, HALF)
    assert not vertex_compatible(SQUARE, polygon((0, 0), (2, 0), (2, 2), (0, 2)))


def test_map_primitive_point_examples():
    p = point("1/3", "2/3")
    g = map_primitive_point(p, p)
    assert g(p) == p
    g = map_primitive_point(point("1/2", "1/2"), point("1/2", 0))
    assert g(point("1/2", "1/2")) == point("1/2", 0)
    g = map_primitive_point(point("1/3", 0), point(0, "1/3"))
    assert g(point("1/3", 0)) == point(0, "1/3")
    with pytest.raises(LevelMismatch):
        map_primitive_point(point("1/2", 0), point("1/3", 0))


@settings(max_examples=300)
@given(st.integers(1, 12), st.integers(0, 10**9))
def test_map_primitive_point_random(n, s):
    rng = random.Random(s)

    def draw():
        while True:
            p = point(F(rng.randint(-5 * n, 5 * n), n), F(rng.randint(-5 * n, 5 * n), n))
            if primitivity_level(p) == n:
                return p

    p, q = draw(), draw()
    g = map_primitive_point(p, q)
    assert isinstance(g, GMap) and g.det in (1, -1)
    assert g(p) == q
