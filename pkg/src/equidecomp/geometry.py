"""Exact rational points, affine unimodular maps and simple polygons.

Everything here works over :class:`fractions.Fraction`; there is no floating
point anywhere.  Points live in the refined lattices ``L_d = (1/d)Z x (1/d)Z``
and the group ``G = GL_2(Z) x| Z^2`` acts on them by ``x -> Ux + v``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import DegenerateTriangle, InvalidPolygon, NotUnimodular


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


def _rational(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating point coordinates are not accepted; use Fraction or str")
    return Fraction(value)


def point(x, y) -> Point:
    """Build a point from ints, Fractions or fraction strings such as ``"-3/4"``."""
    return Point(_rational(x), _rational(y))


def as_point(p) -> Point:
    if isinstance(p, Point):
        return p
    x, y = p
    return point(x, y)


def cross(o: Point, a: Point, b: Point) -> Fraction:
    """Twice the signed area of the triangle ``o, a, b``."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def primitivity_level(p: Point) -> int:
    """Least ``d`` with ``p`` in ``L_d``."""
    return lcm(p.x.denominator, p.y.denominator)


def denominator_of(points: Iterable[Point]) -> int:
    return lcm(1, *(primitivity_level(p) for p in points))


def in_lattice(p: Point, d: int) -> bool:
    return d % primitivity_level(p) == 0


def scaled(p: Point, d: int) -> tuple[int, int]:
    """Integer coordinates of ``d * p``; ``p`` must lie in ``L_d``."""
    x, y = p.x * d, p.y * d
    if x.denominator != 1 or y.denominator != 1:
        raise ValueError(f"{p} is not in L_{d}")
    return x.numerator, y.numerator


def unscaled(x: int, y: int, d: int) -> Point:
    return Point(Fraction(x, d), Fraction(y, d))


def signed_area(points: Sequence[Point]) -> Fraction:
    n = len(points)
    total = Fraction(0)
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        total += p.x * q.y - q.x * p.y
    return total / 2


@dataclass(frozen=True)
class GMap:
    """Affine unimodular map ``x -> U x + v``."""

    matrix: tuple[tuple[int, int], tuple[int, int]] = ((1, 0), (0, 1))
    translation: tuple[int, int] = (0, 0)

    def __post_init__(self):
        (a, b), (c, d) = self.matrix
        entries = (a, b, c, d, *self.translation)
        if not all(isinstance(e, int) and not isinstance(e, bool) for e in entries):
            raise NotUnimodular(f"G-map entries must be integers: {self}")
        if a * d - b * c not in (1, -1):
            raise NotUnimodular(f"det {a * d - b * c} is not +-1")
        object.__setattr__(self, "matrix", ((a, b), (c, d)))
        object.__setattr__(self, "translation", tuple(self.translation))

    @classmethod
    def identity(cls) -> GMap:
        return cls()

    @classmethod
    def translate(cls, vx: int, vy: int) -> GMap:
        return cls(((1, 0), (0, 1)), (vx, vy))

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def is_identity(self) -> bool:
        return self.matrix == ((1, 0), (0, 1)) and self.translation == (0, 0)

    def apply(self, p: Point) -> Point:
        (a, b), (c, d) = self.matrix
        vx, vy = self.translation
        return Point(a * p.x + b * p.y + vx, c * p.x + d * p.y + vy)

    __call__ = apply

    def apply_linear(self, x, y):
        (a, b), (c, d) = self.matrix
        return a * x + b * y, c * x + d * y

    def compose(self, other: GMap) -> GMap:
        """``self o other``: apply ``other`` first."""
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = other.matrix
        ox, oy = other.translation
        vx, vy = self.translation
        return GMap(
            ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)),
            (a * ox + b * oy + vx, c * ox + d * oy + vy),
        )

    def inverse(self) -> GMap:
        (a, b), (c, d) = self.matrix
        s = self.det  # 1/det == det for det = +-1
        ia, ib, ic, id_ = s * d, -s * b, -s * c, s * a
        vx, vy = self.translation
        return GMap(((ia, ib), (ic, id_)), (-(ia * vx + ib * vy), -(ic * vx + id_ * vy)))


def gmap_apply(g: GMap, p: Point) -> Point:
    return g.apply(p)


def gmap_compose(g1: GMap, g2: GMap) -> GMap:
    return g1.compose(g2)


def gmap_invert(g: GMap) -> GMap:
    return g.inverse()


def random_unimodular(rng: random.Random, bound: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Uniform-ish random integer matrix with entries in ``[-bound, bound]`` and det +-1."""
    while True:
        a, b, c, d = (rng.randint(-bound, bound) for _ in range(4))
        if a * d - b * c in (1, -1):
            return (a, b), (c, d)


def random_gmap(rng: random.Random, bound: int = 5, shift: int | None = None) -> GMap:
    shift = bound if shift is None else shift
    return GMap(random_unimodular(rng, bound), (rng.randint(-shift, shift), rng.randint(-shift, shift)))


class OrientedSegment(NamedTuple):
    start: Point
    end: Point

    def reversed(self) -> OrientedSegment:
        return OrientedSegment(self.end, self.start)

    def key(self) -> tuple[Point, Point]:
        """Orientation-free key, used for edge sets."""
        return (self.start, self.end) if self.start <= self.end else (self.end, self.start)

    def mapped(self, g: GMap) -> OrientedSegment:
        return OrientedSegment(g(self.start), g(self.end))


def segment(p, q) -> OrientedSegment:
    p, q = as_point(p), as_point(q)
    if p == q:
        raise ValueError("segment endpoints coincide")
    return OrientedSegment(p, q)


@dataclass(frozen=True, order=True)
class Triangle:
    """Non-degenerate triangle, stored counterclockwise from its lexicographically least vertex."""

    a: Point
    b: Point
    c: Point

    def __post_init__(self):
        a, b, c = (as_point(v) for v in (self.a, self.b, self.c))
        s = cross(a, b, c)
        if s == 0:
            raise DegenerateTriangle(f"zero-area triangle {a}, {b}, {c}")
        if s < 0:
            b, c = c, b
        while a > b or a > c:
            a, b, c = b, c, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def vertices(self) -> tuple[Point, Point, Point]:
        return self.a, self.b, self.c

    @property
    def area(self) -> Fraction:
        return cross(self.a, self.b, self.c) / 2

    def edges(self) -> tuple[OrientedSegment, OrientedSegment, OrientedSegment]:
        """The three edges, oriented counterclockwise."""
        return (
            OrientedSegment(self.a, self.b),
            OrientedSegment(self.b, self.c),
            OrientedSegment(self.c, self.a),
        )

    def mapped(self, g: GMap) -> Triangle:
        return Triangle(g(self.a), g(self.b), g(self.c))

    def centroid(self) -> Point:
        return Point((self.a.x + self.b.x + self.c.x) / 3, (self.a.y + self.b.y + self.c.y) / 3)

    def contains(self, p: Point, closed: bool = True) -> bool:
        s1 = cross(self.a, self.b, p)
        s2 = cross(self.b, self.c, p)
        s3 = cross(self.c, self.a, p)
        if closed:
            return s1 >= 0 and s2 >= 0 and s3 >= 0
        return s1 > 0 and s2 > 0 and s3 > 0


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True if ``p`` lies on the closed segment ``[a, b]``."""
    if cross(a, b, p) != 0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ``[a, b]`` and ``[c, d]`` share at least one point."""
    d1 = cross(c, d, a)
    d2 = cross(c, d, b)
    d3 = cross(a, b, c)
    d4 = cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    return on_segment(a, c, d) or on_segment(b, c, d) or on_segment(c, a, b) or on_segment(d, a, b)


class Location(enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


def _check_simple(vertices: Sequence[Point]) -> None:
    n = len(vertices)
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for i, (a, b) in enumerate(edges):
        if a == b:
            raise InvalidPolygon(f"repeated consecutive vertex {a}")
    for i in range(n):
        a, b = edges[i]
        # consecutive edges may only meet at their shared vertex
        _, c = edges[(i + 1) % n]
        if cross(a, b, c) == 0 and (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y) < 0:
            raise InvalidPolygon(f"boundary folds back on itself at {b}")
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            c, d = edges[j]
            if segments_intersect(a, b, c, d):
                raise InvalidPolygon(f"boundary self-intersects: edges {i} and {j}")


@dataclass(frozen=True)
class Polygon:
    """Simple (possibly non-convex) rational polygon with a counterclockwise boundary."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(as_point(v) for v in self.vertices)
        if len(verts) < 3:
            raise InvalidPolygon("a polygon needs at least 3 vertices")
        _check_simple(verts)
        area = signed_area(verts)
        if area == 0:
            raise InvalidPolygon("polygon has zero area")
        if area < 0:
            verts = verts[::-1]
        object.__setattr__(self, "vertices", verts)

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def denominator(self) -> int:
        return denominator_of(self.vertices)

    @cached_property
    def area(self) -> Fraction:
        return signed_area(self.vertices)

    def edges(self) -> Iterator[OrientedSegment]:
        n = len(self.vertices)
        for i in range(n):
            yield OrientedSegment(self.vertices[i], self.vertices[(i + 1) % n])

    def bounding_box(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def mapped(self, g: GMap) -> Polygon:
        return Polygon(tuple(g(p) for p in self.vertices))

    def locate(self, p: Point) -> Location:
        return point_location(self, p)

    def __str__(self) -> str:
        return "Polygon[" + ", ".join(map(str, self.vertices)) + "]"


def polygon(*vertices) -> Polygon:
    return Polygon(tuple(as_point(v) for v in vertices))


def polygon_area(P: Polygon) -> Fraction:
    return P.area


def point_location(P: Polygon, p: Point) -> Location:
    """Exact crossing-number classification of ``p`` against ``P``."""
    inside = False
    for a, b in P.edges():
        if on_segment(p, a, b):
            return Location.BOUNDARY
        if (a.y > p.y) != (b.y > p.y):
            # x-coordinate of the crossing, compared without dividing
            t = (p.y - a.y) / (b.y - a.y)
            if p.x < a.x + t * (b.x - a.x):
                inside = not inside
    return Location.INTERIOR if inside else Location.OUTSIDE


def lattice_points_on_segment(a: Point, b: Point, d: int) -> list[Point]:
    """Points of ``L_d`` on the closed segment ``[a, b]`` (endpoints in ``L_d``), in order from ``a``."""
    ax, ay = scaled(a, d)
    bx, by = scaled(b, d)
    g = gcd(bx - ax, by - ay)
    sx, sy = (bx - ax) // g, (by - ay) // g
    return [unscaled(ax + k * sx, ay + k * sy, d) for k in range(g + 1)]


def is_minimal_segment(E: OrientedSegment, d: int) -> bool:
    if not (in_lattice(E.start, d) and in_lattice(E.end, d)):
        return False
    px, py = scaled(E.start, d)
    qx, qy = scaled(E.end, d)
    return gcd(qx - px, qy - py) == 1


def is_minimal_triangle(T: Triangle, d: int) -> bool:
    if not all(in_lattice(v, d) for v in T.vertices):
        return False
    return T.area * 2 * d * d == 1


def split_convex(poly: Sequence[Point], a: Point, b: Point) -> tuple[list[Point], list[Point]]:
    """Cut a convex polygon by the line through ``a, b``.

    Returns the parts on the left (counterclockwise side) and right of the
    directed line; either may be empty or degenerate.
    """
    left: list[Point] = []
    right: list[Point] = []
    n = len(poly)
    sides = [cross(a, b, p) for p in poly]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        sp, sq = sides[i], sides[(i + 1) % n]
        if sp >= 0:
            left.append(p)
        if sp <= 0:
            right.append(p)
        if (sp > 0 and sq < 0) or (sp < 0 and sq > 0):
            t = sp / (sp - sq)
            x = Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
            left.append(x)
            right.append(x)
    return left, right


def fan_triangles(poly: Sequence[Point]) -> list[Triangle]:
    """Triangulate a convex polygon from its first vertex, skipping degenerate slivers."""
    pts: list[Point] = []
    for p in poly:
        if not pts or pts[-1] != p:
            pts.append(p)
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    out = []
    for i in range(1, len(pts) - 1):
        if cross(pts[0], pts[i], pts[i + 1]) != 0:
            out.append(Triangle(pts[0], pts[i], pts[i + 1]))
    return out
