import random
from collections import Counter, deque
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from equidecomp.errors import DenominatorMismatch, NotAdjacent, NotParallelogram
from equidecomp.geometry import OrientedSegment, Triangle, point, polygon
from equidecomp.synthesize import random_polygon
from equidecomp.triangulation import (
    Triangulation,
    classical_flip,
    face_sets,
    flippable_pairs,
    minimal_triangulation,
)
from equidecomp.weights import edge_weight_class, polygon_weight

SQUARE = polygon((0, 0), (1, 0), (1, 1), (0, 1))
HALF = polygon((0, 0), ("1/2", 0), (0, "1/2"))
L_SHAPE = polygon((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))


def test_facet_counts():
    assert len(minimal_triangulation(SQUARE, 1).facets) == 2
    T = minimal_triangulation(SQUARE, 2)
    assert len(T.facets) == 8 and all(t.area == F(1, 8) for t in T.facets)
    assert len(minimal_triangulation(HALF, 2).facets) == 1


def test_face_sets_examples():
    fs = face_sets(minimal_triangulation(SQUARE, 1))
    assert (len(fs.vertices), len(fs.open_edges), len(fs.open_facets)) == (4, 5, 2)
    fs = face_sets(minimal_triangulation(HALF, 2))
    assert (len(fs.vertices), len(fs.open_edges), len(fs.open_facets)) == (3, 3, 1)
    fs = face_sets(minimal_triangulation(SQUARE, 2))
    assert (len(fs.vertices), len(fs.open_edges), len(fs.open_facets)) == (9, 16, 8)
    assert fs.euler_characteristic == 1


def test_denominator_must_divide_level():
    with pytest.raises(DenominatorMismatch):
        minimal_triangulation(HALF, 3)


def test_flip_square_diagonal_and_involution():
    T = minimal_triangulation(SQUARE, 1)
    f1, f2 = T.facets
    T2 = classical_flip(T, f1, f2)
    assert T2 != T
    diag = {k for k in T.interior_edges()}
    diag2 = {k for k in T2.interior_edges()}
    assert diag.isdisjoint(diag2)
    g1, g2 = T2.facets
    assert classical_flip(T2, g1, g2) == T


def test_flip_errors():
    T = minimal_triangulation(SQUARE, 2)
    a, b = T.facets[0], T.facets[-1]
    with pytest.raises(NotAdjacent):
        classical_flip(T, a, b)
    P = polygon((0, 0), (2, 0), (0, 1))
    U = Triangulation(P, 1, (Triangle(point(0, 0), point(1, 0), point(0, 1)), Triangle(point(1, 0), point(2, 0), point(0, 1))))
    with pytest.raises(NotParallelogram):
        classical_flip(U, *U.facets)


@pytest.mark.parametrize(
    "P,d",
    [(SQUARE, 1), (SQUARE, 2), (SQUARE, 3), (HALF, 2), (HALF, 4), (L_SHAPE, 1), (L_SHAPE, 2),
     (polygon((0, 0), ("3/2", 0), ("1/2", "1/2"), ("3/2", 1), (0, 1)), 2)],
)
def test_triangulations_validate(P, d):
    for variant in range(4):
        T = minimal_triangulation(P, d, variant)
        T.validate()
        assert len(T.facets) == P.area * 2 * d * d
        assert face_sets(T).euler_characteristic == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 3), st.integers(1, 2))
def test_random_polygon_triangulations(s, d, m):
    rng = random.Random(s)
    P = random_polygon(rng, d, size=2, max_vertices=6)
    T = minimal_triangulation(P, m * d, rng.randint(0, 3))
    T.validate()
    assert len(T.facets) == P.area * 2 * (m * d) ** 2
    pairs = flippable_pairs(T)
    if pairs:
        T2 = classical_flip(T, *rng.choice(pairs))  # validates
        assert sum(t.area for t in T2.facets) == P.area


def _edge_count_identity(T: Triangulation, d: int) -> None:
    """Each edge class count equals half the facet-side incidences plus half the boundary count."""
    fs = face_sets(T)
    cls = {k: edge_weight_class(OrientedSegment(*k), d) for k in fs.open_edges}
    boundary = polygon_weight(T.polygon, d).counts
    for c in set(cls.values()):
        lhs = sum(1 for k in fs.open_edges if cls[k] == c)
        delta = Counter()
        for f in fs.open_facets:
            n = sum(1 for e in f.edges() if edge_weight_class(e, d) == c)
            delta[n] += 1
        rhs = F(delta[1] + 2 * delta[2] + 3 * delta[3], 2) + F(boundary.get(c, 0), 2)
        assert lhs == rhs, (c, lhs, rhs)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 3))
def test_edge_count_identity(s, d):
    rng = random.Random(s)
    P = random_polygon(rng, d, size=2, max_vertices=6)
    d2 = d * rng.choice([1, 2]) if d < 3 else d
    _edge_count_identity(minimal_triangulation(P, d2), d2)


def _flip_component(T: Triangulation, limit: int = 20000) -> set:
    seen = {T}
    queue = deque([T])
    while queue:
        U = queue.popleft()
        for f1, f2 in flippable_pairs(U):
            V = classical_flip(U, f1, f2, check=False)
            if V not in seen:
                seen.add(V)
                queue.append(V)
                assert len(seen) < limit
    return seen


@pytest.mark.parametrize("P,d", [(SQUARE, 2), (HALF, 4), (L_SHAPE, 1)])
def test_different_ear_orders_are_flip_connected(P, d):
    base = minimal_triangulation(P, d, 0)
    comp = _flip_component(base)
    for variant in range(1, 4):
        assert minimal_triangulation(P, d, variant) in comp
