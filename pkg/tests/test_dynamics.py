import random
from fractions import Fraction as F
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from equidecomp.dynamics import (
    FlipPairing,
    PseudoTriangulation,
    apply_steps,
    dynamics_equal,
    dynamics_reachable,
    enumerate_triangle_weight_classes,
    find_flip_path,
    flip_results,
    initial_pseudo_triangulation,
    pseudo_flip,
    pseudo_flip_pairings,
    weight_class_graph,
)
from equidecomp.errors import CapExceeded, InvalidPairing
from equidecomp.geometry import OrientedSegment, Point, Triangle, polygon
from equidecomp.synthesize import synthesize_equidecomposable_pair
from equidecomp.weights import WeightTriple, edge_weight, triangle_weight

from oracles import weight_classes_closed_form

SQUARE = polygon((0, 0), (1, 0), (1, 1), (0, 1))
HALF = polygon((0, 0), ("1/2", 0), (0, "1/2"))


def W(*r, d):
    return WeightTriple.of(r, d)


def test_pairings_examples():
    assert pseudo_flip_pairings(W(0, 0, 0, d=1), W(0, 0, 0, d=1))
    ps = pseudo_flip_pairings(W(0, 0, 1, d=2), W(1, 1, 1, d=2))
    assert FlipPairing(1, 1, 0, 1, 0, 1, 2) in ps


def test_pairings_match_exhaustive_scan():
    a, b = W(0, 0, 1, d=3), W(0, 0, 1, d=3)
    expected = set()
    for i in permutations(range(3)):
        for j in permutations(range(3)):
            u, v, w = (a.residues[k] for k in i)
            x, y, z = (b.residues[k] for k in j)
            if (u + x) % 3 == 0 and (v + y) % 3 == 1 and (w + z) % 3 == 1:
                expected.add((u, x, frozenset([(v, y), (w, z)])))
    got = {(p.u, p.x, frozenset([(p.v, p.y), (p.w, p.z)])) for p in pseudo_flip_pairings(a, b)}
    assert got == expected


def test_pseudo_flip_examples():
    p = FlipPairing(1, 1, 0, 1, 0, 1, 2)
    assert pseudo_flip(W(0, 0, 1, d=2), W(1, 1, 1, d=2), p) == (W(0, 1, 0, d=2), W(0, 1, 0, d=2))
    z = W(0, 0, 0, d=1)
    for p in pseudo_flip_pairings(z, z):
        assert pseudo_flip(z, z, p) == (z, z)
    p = FlipPairing(0, 0, 0, 1, 1, 0, 3)
    assert pseudo_flip(W(0, 0, 1, d=3), W(0, 1, 0, d=3), p) == (W(0, 0, 1, d=3), W(1, 1, 2, d=3))
    with pytest.raises(InvalidPairing):
        pseudo_flip(W(0, 0, 1, d=3), W(0, 0, 1, d=3), FlipPairing(1, 1, 0, 1, 0, 1, 3))


def random_minimal_triangle(rng, d):
    while True:
        pts = [Point(F(rng.randint(-2 * d, 2 * d), d), F(rng.randint(-2 * d, 2 * d), d)) for _ in range(3)]
        try:
            T = Triangle(*pts)
        except Exception:
            continue
        if T.area == F(1, 2 * d * d):
            return T


def geometric_flip(S: Triangle, d: int):
    """Reflect S across the midpoint of one edge, exchange the diagonal, and recompute weights."""
    A, B, C = S.vertices
    D = Point(A.x + B.x - C.x, A.y + B.y - C.y)
    T = Triangle(B, A, D)
    S1, S2 = Triangle(A, D, C), Triangle(D, B, C)
    ew = lambda p, q: edge_weight(OrientedSegment(p, q), d)
    labels_S = (ew(A, B), ew(B, C), ew(C, A))
    labels_T = (ew(B, A), ew(A, D), ew(D, B))
    return T, (triangle_weight(S1, d), triangle_weight(S2, d)), labels_S, labels_T


@settings(max_examples=500, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**9))
def test_pseudo_flip_well_defined(d, s):
    S = random_minimal_triangle(random.Random(s), d)
    T, after, (u, v, w), (x, y, z) = geometric_flip(S, d)
    w1, w2 = triangle_weight(S, d), triangle_weight(T, d)
    candidates = [FlipPairing(u, x, v, z, w, y, d), FlipPairing(u, x, v, y, w, z, d)]
    holding = [p for p in candidates if p.holds()]
    assert holding
    want = tuple(sorted(after))
    for p in holding:
        assert tuple(sorted(pseudo_flip(w1, w2, p))) == want
    assert want in flip_results(w1, w2)


@pytest.mark.parametrize("d", range(1, 7))
def test_pseudo_flip_reversible_and_sum_preserving(d):
    classes = enumerate_triangle_weight_classes(d)
    for i, a in enumerate(classes):
        for b in classes[i:]:
            for r1, r2 in flip_results(a, b):
                back = flip_results(r1, r2)
                assert tuple(sorted((a, b))) in back
                assert (sum(r1.residues) + sum(r2.residues)) % d == (sum(a.residues) + sum(b.residues)) % d


def test_initial_pseudo_triangulations():
    assert initial_pseudo_triangulation(HALF, 2).triples == (W(0, 0, 1, d=2),)
    assert initial_pseudo_triangulation(SQUARE, 1).triples == (W(0, 0, 0, d=1),) * 2
    pt = initial_pseudo_triangulation(SQUARE, 2)
    assert len(pt) == 8 and all(sum(t.residues) % 2 == 1 for t in pt.triples)


def test_reachable_examples():
    assert len(dynamics_reachable(initial_pseudo_triangulation(SQUARE, 1)).reachable) == 1
    assert len(dynamics_reachable(initial_pseudo_triangulation(HALF, 2)).reachable) == 1
    res = dynamics_reachable(initial_pseudo_triangulation(SQUARE, 2))
    assert not res.truncated
    for pt in res.reachable:
        for i in range(len(pt)):
            for j in range(i + 1, len(pt)):
                for r in flip_results(pt.triples[i], pt.triples[j]):
                    rest = list(pt.triples[:i] + pt.triples[i + 1 : j] + pt.triples[j + 1 :])
                    assert PseudoTriangulation.of(2, rest + list(r)) in res.reachable
    for pt in list(res.reachable)[:5]:
        assert apply_steps(res.seed, res.path_to(pt)) == pt


def test_reachable_truncation():
    res = dynamics_reachable(initial_pseudo_triangulation(SQUARE, 3), max_states=10)
    assert res.truncated and len(res.reachable) <= 10


@pytest.mark.parametrize("P,d", [(SQUARE, 2), (SQUARE, 3), (polygon((0, 0), (1, 0), ("1/2", 1)), 2)])
def test_reachable_set_independent_of_initial_triangulation(P, d):
    sets = {frozenset(dynamics_reachable(initial_pseudo_triangulation(P, d, v)).reachable) for v in range(4)}
    assert len(sets) == 1


def test_dynamics_equal_examples():
    r = dynamics_equal(HALF, HALF, 2)
    assert r.equal and r.path == []
    r = dynamics_equal(SQUARE, HALF, 2)
    assert not r.equal


@pytest.mark.parametrize("seed", range(4))
def test_flip_path_to_synthesized_partner(seed):
    P = polygon((0, 0), ("3/2", 0), ("3/2", "1/2"), ("1/2", 1), (0, 1))
    s = synthesize_equidecomposable_pair(P, 2, seed)
    r = dynamics_equal(P, s.target, 2)
    assert r.equal
    assert apply_steps(r.source, r.path) == r.target


def test_find_flip_path_none_for_different_sizes():
    a = PseudoTriangulation.of(2, [W(0, 0, 1, d=2)])
    b = PseudoTriangulation.of(2, [W(0, 0, 1, d=2)] * 2)
    assert find_flip_path(a, b) is None


def test_weight_class_graph_small():
    G = weight_class_graph(1)
    assert G.vertices == [W(0, 0, 0, d=1)] and G.loops() == G.vertices
    G = weight_class_graph(2)
    assert W(0, 0, 1, d=2) in G.vertices and W(1, 1, 1, d=2) in G.vertices
    assert G.max_degree() <= 3
    dot = G.to_dot()
    assert dot.startswith("graph G2 {") and dot.rstrip().endswith("}")


@pytest.mark.parametrize("d", range(1, 9))
def test_weight_classes_match_closed_form(d):
    got = {t.residues for t in enumerate_triangle_weight_classes(d)}
    assert got == weight_classes_closed_form(d)
    assert all(sum(r) % d == 1 % d for r in got)


def test_graph_six_degree_bound():
    G = weight_class_graph(6)
    assert G.max_degree() <= 3
    assert set(G.loops()) <= set(G.vertices)


def test_class_cap():
    with pytest.raises(CapExceeded):
        enumerate_triangle_weight_classes(10, cap=8)
