"""d'-minimal triangulations of rational polygons, their faces, and diagonal flips."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor

from .errors import DenominatorMismatch, NotAdjacent, NotParallelogram
from .ehrhart import Region, _row_intervals, components, region_area
from .geometry import (
    Point,
    Polygon,
    Triangle,
    cross,
    is_minimal_triangle,
    scaled,
    unscaled,
)
from .weights import boundary_minimal_edges

EdgeKey = tuple[Point, Point]


def edge_key(p: Point, q: Point) -> EdgeKey:
    return (p, q) if p <= q else (q, p)


def ear_clip(P: Polygon, start: int = 0) -> list[Triangle]:
    """Exact ear clipping of a simple polygon.

    Straight (180 degree) vertices are kept so the result stays edge-to-edge;
    they are simply never chosen as ear tips.
    """
    verts = list(P.vertices)
    k = start % len(verts)
    verts = verts[k:] + verts[:k]
    out = []
    while len(verts) > 3:
        n = len(verts)
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            if cross(a, b, c) <= 0:
                continue
            tri = Triangle(a, b, c)
            if any(tri.contains(p) for p in verts if p not in (a, b, c)):
                continue
            out.append(tri)
            del verts[i]
            break
        else:  # pragma: no cover - every simple polygon has an ear
            raise AssertionError(f"no ear found in {verts}")
    out.append(Triangle(*verts))
    return out


def lattice_points_in(P: Polygon, d: int) -> list[Point]:
    """Points of ``L_d`` in the closed polygon, sorted lexicographically."""
    verts = [Point(v.x * d, v.y * d) for v in P.vertices]
    ys = [v.y for v in verts]
    found = set()
    for Y in range(ceil(min(ys)), floor(max(ys)) + 1):
        for lo, hi in _row_intervals(verts, Y):
            for X in range(ceil(lo), floor(hi) + 1):
                found.add(Point(Fraction(X, d), Fraction(Y, d)))
    return sorted(found)


IntPoint = tuple[int, int]


def _icross(o: IntPoint, a: IntPoint, b: IntPoint) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _itri(a: IntPoint, b: IntPoint, c: IntPoint) -> tuple[IntPoint, IntPoint, IntPoint]:
    return (a, b, c) if _icross(a, b, c) > 0 else (a, c, b)


class _Mesh:
    """Mutable edge-to-edge triangle soup on the scaled integer lattice, used while inserting points."""

    def __init__(self, triangles):
        self.triangles: set = set()
        self.by_edge: dict = {}
        for t in triangles:
            self.add(t)

    @staticmethod
    def _edges(t):
        a, b, c = t
        return (a, b), (b, c), (c, a)

    def add(self, t) -> None:
        self.triangles.add(t)
        for u, v in self._edges(t):
            self.by_edge.setdefault(frozenset((u, v)), set()).add(t)

    def remove(self, t) -> None:
        self.triangles.remove(t)
        for u, v in self._edges(t):
            k = frozenset((u, v))
            self.by_edge[k].discard(t)
            if not self.by_edge[k]:
                del self.by_edge[k]

    def insert(self, p: IntPoint) -> None:
        host = None
        for t in self.triangles:
            a, b, c = t
            if _icross(a, b, p) >= 0 and _icross(b, c, p) >= 0 and _icross(c, a, p) >= 0:
                host = t
                break
        if host is None or p in host:
            return
        on_edge = next(((u, v) for u, v in self._edges(host) if _icross(u, v, p) == 0), None)
        if on_edge is None:
            self.remove(host)
            for u, v in self._edges(host):
                self.add((u, v, p))
            return
        a, b = on_edge
        for t in list(self.by_edge[frozenset((a, b))]):
            self.remove(t)
            apex = next(v for v in t if v not in (a, b))
            self.add(_itri(a, apex, p))
            self.add(_itri(b, apex, p))


@dataclass(frozen=True)
class Triangulation:
    polygon: Region
    level: int
    facets: tuple[Triangle, ...]

    def __post_init__(self):
        object.__setattr__(self, "facets", tuple(sorted(self.facets)))

    def __eq__(self, other):
        if not isinstance(other, Triangulation):
            return NotImplemented
        return self.level == other.level and self.facets == other.facets

    def __hash__(self):
        return hash((self.level, self.facets))

    @cached_property
    def adjacency(self) -> dict[EdgeKey, tuple[Triangle, ...]]:
        out: dict[EdgeKey, list[Triangle]] = {}
        for t in self.facets:
            for e in t.edges():
                out.setdefault(edge_key(*e), []).append(t)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def edges(self) -> frozenset[EdgeKey]:
        return frozenset(self.adjacency)

    @cached_property
    def vertices(self) -> frozenset[Point]:
        return frozenset(v for t in self.facets for v in t.vertices)

    def interior_edges(self) -> list[EdgeKey]:
        return sorted(k for k, ts in self.adjacency.items() if len(ts) == 2)

    def boundary_edges(self) -> list[EdgeKey]:
        return sorted(k for k, ts in self.adjacency.items() if len(ts) == 1)

    def validate(self) -> None:
        """Raise AssertionError unless this is an edge-to-edge d'-minimal triangulation of its polygon."""
        d = self.level
        assert all(is_minimal_triangle(t, d) for t in self.facets), "non-minimal facet"
        assert sum((t.area for t in self.facets), Fraction(0)) == region_area(self.polygon), "area mismatch"
        assert all(len(ts) <= 2 for ts in self.adjacency.values()), "edge shared by 3 facets"
        expected = {edge_key(*E) for part in components(self.polygon) for E in boundary_minimal_edges(part, d)}
        assert set(self.boundary_edges()) == expected, "boundary does not match the polygon"
        V, E, F = len(self.vertices), len(self.edges), len(self.facets)
        assert V - E + F == len(components(self.polygon)), "Euler characteristic"


def minimal_triangulation(P: Region, d: int, variant: int = 0) -> Triangulation:
    """Edge-to-edge triangulation of P into d-minimal triangles.

    Each component is ear-clipped, then every point of ``L_d`` in it is
    inserted in lexicographic order (reversed for odd ``variant``).  Once no
    facet contains a lattice point besides its vertices, each facet has area
    ``1/(2d^2)`` by Pick's theorem.
    """
    facets: list[Triangle] = []
    for part in components(P):
        if d % part.denominator:
            raise DenominatorMismatch(f"denominator {part.denominator} does not divide {d}")
        mesh = _Mesh(tuple(scaled(v, d) for v in t.vertices) for t in ear_clip(part, start=variant))
        pts = [scaled(p, d) for p in lattice_points_in(part, d)]
        if variant % 2:
            pts.reverse()
        for p in pts:
            mesh.insert(p)
        facets.extend(Triangle(*(unscaled(x, y, d) for x, y in t)) for t in mesh.triangles)
    return Triangulation(P, d, tuple(facets))


def classical_flip(T: Triangulation, f1: Triangle, f2: Triangle, check: bool = True) -> Triangulation:
    """Exchange the diagonal of the parallelogram formed by two adjacent facets."""
    shared = set(f1.vertices) & set(f2.vertices)
    if f1 not in T.facets or f2 not in T.facets or len(shared) != 2 or f1 == f2:
        raise NotAdjacent(f"{f1} and {f2} do not share an edge of the triangulation")
    a, b = sorted(shared)
    c = next(v for v in f1.vertices if v not in shared)
    e = next(v for v in f2.vertices if v not in shared)
    if a.x + b.x != c.x + e.x or a.y + b.y != c.y + e.y:
        raise NotParallelogram(f"{f1} and {f2} do not form a parallelogram")
    facets = [t for t in T.facets if t not in (f1, f2)] + [Triangle(c, e, a), Triangle(c, e, b)]
    out = Triangulation(T.polygon, T.level, tuple(facets))
    if check:
        out.validate()
    return out


def flippable_pairs(T: Triangulation) -> list[tuple[Triangle, Triangle]]:
    out = []
    for k in T.interior_edges():
        f1, f2 = T.adjacency[k]
        a, b = k
        c = next(v for v in f1.vertices if v not in k)
        e = next(v for v in f2.vertices if v not in k)
        if a.x + b.x == c.x + e.x and a.y + b.y == c.y + e.y:
            out.append((f1, f2))
    return out


@dataclass(frozen=True)
class FaceSets:
    vertices: frozenset[Point]
    open_edges: frozenset[EdgeKey]
    open_facets: frozenset[Triangle]

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.open_edges) + len(self.open_facets)


def face_sets(T: Triangulation) -> FaceSets:
    return FaceSets(T.vertices, T.edges, frozenset(T.facets))

