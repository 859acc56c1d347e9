"""Piecewise G-bijections between regions and an independent checker for them.

A relation is a list of open cells (open triangles, open segments, points),
each carrying a G-map.  It is valid when the cells partition the source and
their images partition the target.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .ehrhart import Region, components, count_lattice_points, region_area, region_denominator
from .geometry import GMap, Location, Point, Triangle, cross, denominator_of, lattice_points_on_segment
from .errors import DegenerateTriangle, NotUnimodular

KINDS = ("triangle", "segment", "point")


@dataclass(frozen=True)
class Piece:
    kind: str
    vertices: tuple[Point, ...]
    matrix: tuple[tuple[int, int], tuple[int, int]]
    translation: tuple[int, int]

    @classmethod
    def of(cls, kind: str, vertices: Sequence[Point], g: GMap) -> Piece:
        return cls(kind, tuple(vertices), g.matrix, g.translation)

    @property
    def gmap(self) -> GMap:
        return GMap(self.matrix, self.translation)

    def image(self) -> Piece:
        g = self.gmap
        return Piece(self.kind, tuple(g(v) for v in self.vertices), self.matrix, self.translation)


@dataclass
class Relation:
    pieces: list[Piece] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pieces)

    def of_kind(self, kind: str) -> list[Piece]:
        return [p for p in self.pieces if p.kind == kind]

    def summary(self) -> dict[str, int]:
        c = Counter(p.kind for p in self.pieces)
        return {k: c.get(k, 0) for k in KINDS}


@dataclass(frozen=True)
class Failure:
    kind: str  # Overlap, Gap, NotUnimodular, ImageOverlap, ImageGap, Malformed, EhrhartMismatch
    detail: str


@dataclass
class Report:
    failures: list[Failure]

    @property
    def ok(self) -> bool:
        return not self.failures

    def kinds(self) -> set[str]:
        return {f.kind for f in self.failures}


# ---------------------------------------------------------------------------
# exact predicates


def _interiors_disjoint(s: Triangle, t: Triangle) -> bool:
    """Separating-axis test: some edge line of one triangle has the other on its closed outer side."""
    for p, q in ((s, t), (t, s)):
        for e in p.edges():
            if all(cross(e.start, e.end, v) <= 0 for v in q.vertices):
                return True
    return False


def _segment_meets_open_triangle(a: Point, b: Point, t: Triangle) -> bool:
    """Does the closed segment ``[a, b]`` meet the open triangle?  Exact parametric clipping."""
    lo, hi = Fraction(0), Fraction(1)
    for e in t.edges():
        f0 = cross(e.start, e.end, a)
        f1 = cross(e.start, e.end, b)
        slope = f1 - f0
        if slope == 0:
            if f0 <= 0:
                return False
            continue
        root = -f0 / slope
        if slope > 0:
            lo = max(lo, root)
        else:
            hi = min(hi, root)
    if lo < hi:
        return True
    if lo > hi:
        return False
    p = Point(a.x + lo * (b.x - a.x), a.y + lo * (b.y - a.y))
    return t.contains(p, closed=False)


def triangle_inside(t: Triangle, R: Region) -> bool:
    """Closed triangle lies in the closed region."""
    for part in components(R):
        if part.locate(t.centroid()) is not Location.INTERIOR:
            continue
        return not any(_segment_meets_open_triangle(e.start, e.end, t) for e in part.edges())
    return False


def _bbox(t: Triangle):
    xs = [v.x for v in t.vertices]
    ys = [v.y for v in t.vertices]
    return min(xs), max(xs), min(ys), max(ys)


def overlapping_pairs(tris: Sequence[Triangle]) -> list[tuple[int, int]]:
    """Index pairs of triangles whose interiors meet, with a sweep over x-extents."""
    boxes = [_bbox(t) for t in tris]
    order = sorted(range(len(tris)), key=lambda i: boxes[i][0])
    active: list[int] = []
    out = []
    for i in order:
        x0, x1, y0, y1 = boxes[i]
        active = [j for j in active if boxes[j][1] > x0]
        for j in active:
            if boxes[j][3] <= y0 or y1 <= boxes[j][2]:
                continue
            if not _interiors_disjoint(tris[i], tris[j]):
                out.append((min(i, j), max(i, j)))
        active.append(i)
    return sorted(out)


# ---------------------------------------------------------------------------
# skeleton atoms


def segment_atoms(a: Point, b: Point, D: int, closed: bool) -> list[tuple]:
    """Atoms of a segment at level D: its ``L_D`` points and the open D-minimal pieces between them."""
    pts = lattice_points_on_segment(a, b, D)
    atoms: list[tuple] = []
    for p, q in zip(pts, pts[1:]):
        atoms.append(("e",) + ((p, q) if p <= q else (q, p)))
    inner = pts if closed else pts[1:-1]
    atoms.extend(("v", p) for p in inner)
    return atoms


def skeleton_atoms(triangles: Iterable[Triangle], D: int) -> set[tuple]:
    out: set[tuple] = set()
    for t in triangles:
        for e in t.edges():
            out.update(segment_atoms(e.start, e.end, D, closed=True))
    return out


def _cell_atoms(piece: Piece, D: int) -> list[tuple]:
    if piece.kind == "point":
        return [("v", piece.vertices[0])]
    a, b = piece.vertices
    return segment_atoms(a, b, D, closed=False)


# ---------------------------------------------------------------------------


def _check_side(R: Region, pieces: Sequence[Piece], D: int, overlap: str, gap: str) -> list[Failure]:
    failures: list[Failure] = []
    tris = []
    for p in pieces:
        if p.kind == "triangle":
            tris.append(Triangle(*p.vertices))
    for i, j in overlapping_pairs(tris):
        failures.append(Failure(overlap, f"open triangles {tris[i]} and {tris[j]} overlap"))
    for t in tris:
        if not triangle_inside(t, R):
            failures.append(Failure(overlap, f"triangle {t} is not contained in the region"))
    covered = sum((t.area for t in tris), Fraction(0))
    if covered < region_area(R):
        failures.append(Failure(gap, f"triangles cover area {covered} of {region_area(R)}"))
    elif covered > region_area(R) and not failures:
        failures.append(Failure(overlap, f"triangles cover area {covered} > {region_area(R)}"))

    skeleton = skeleton_atoms(tris, D)
    seen: Counter = Counter()
    for p in pieces:
        if p.kind != "triangle":
            seen.update(_cell_atoms(p, D))
    for atom, m in sorted(seen.items()):
        if m > 1:
            failures.append(Failure(overlap, f"{_atom_str(atom)} is covered {m} times"))
        if atom not in skeleton:
            failures.append(Failure(overlap, f"{_atom_str(atom)} is not on the triangle boundaries"))
    missing = sorted(skeleton - set(seen))
    for atom in missing[:20]:
        failures.append(Failure(gap, f"{_atom_str(atom)} is not covered"))
    if len(missing) > 20:
        failures.append(Failure(gap, f"... and {len(missing) - 20} more uncovered atoms"))
    return failures


def _atom_str(atom: tuple) -> str:
    if atom[0] == "v":
        return f"point {atom[1]}"
    return f"open segment {atom[1]}-{atom[2]}"


def verify_relation(P: Region, Q: Region, rel: Relation, ehrhart_check: bool = True) -> Report:
    """Independent check that ``rel`` partitions P and its images partition Q."""
    failures: list[Failure] = []
    good: list[Piece] = []
    arity = {"triangle": 3, "segment": 2, "point": 1}
    for p in rel.pieces:
        if p.kind not in arity or len(p.vertices) != arity[p.kind]:
            failures.append(Failure("Malformed", f"bad cell {p.kind} with {len(p.vertices)} vertices"))
            continue
        try:
            p.gmap
        except NotUnimodular as exc:
            failures.append(Failure("NotUnimodular", str(exc)))
            continue
        if p.kind == "segment" and p.vertices[0] == p.vertices[1]:
            failures.append(Failure("Malformed", "segment with equal endpoints"))
            continue
        if p.kind == "triangle":
            try:
                Triangle(*p.vertices)
            except DegenerateTriangle as exc:
                failures.append(Failure("Malformed", str(exc)))
                continue
        good.append(p)
    if failures:
        return Report(failures)
    D = lcm(1, *(denominator_of(p.vertices) for p in good))
    failures += _check_side(P, good, D, "Overlap", "Gap")
    failures += _check_side(Q, [p.image() for p in good], D, "ImageOverlap", "ImageGap")
    if ehrhart_check and not failures:
        L = lcm(region_denominator(P), region_denominator(Q))
        for t in range(1, 3 * L + 1):
            a, b = count_lattice_points(P, t), count_lattice_points(Q, t)
            if a != b:
                failures.append(Failure("EhrhartMismatch", f"|{t}P ∩ Z^2| = {a} but |{t}Q ∩ Z^2| = {b}"))
                break
    return Report(failures)


def identity_relation(P: Region, level: int | None = None) -> Relation:
    """The identity relation on P, cut along a minimal triangulation."""
    from .equidecompose import extend_facet_map, FacetMap
    from .triangulation import minimal_triangulation

    d = level or region_denominator(P)
    T = minimal_triangulation(P, d)
    fm = FacetMap(P, P, d, [(f, GMap.identity()) for f in T.facets])
    return extend_facet_map(fm)
