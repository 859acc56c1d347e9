"""Facet maps, their extension to full relations, and the decision procedure.

Two constructions produce facet maps.  The direct one flips the actual
triangulation of the target with diagonal exchanges until its weight
multiset matches the source's; every map is then a single minimal triangle.
The general one replays an abstract pseudo-flip path on cells that carry
pieces of the source, cutting them along the new diagonal at every step.
"""

from __future__ import annotations

import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from math import lcm
from typing import Iterator, Optional, Sequence

from .dynamics import (
    DEFAULT_MAX_STATES,
    FlipStep,
    PseudoTriangulation,
    find_flip_path,
)
from .ehrhart import Region, components, map_primitive_point, region_denominator, vertex_compatible
from .errors import CompatibilityViolated, PathInvalid, Truncated
from .geometry import (
    GMap,
    OrientedSegment,
    Point,
    Triangle,
    cross,
    denominator_of,
    fan_triangles,
    primitivity_level,
    split_convex,
)
from .relation import Piece, Relation, segment_atoms, verify_relation, Report
from .triangulation import Triangulation, classical_flip, flippable_pairs, minimal_triangulation
from .weights import WeightTriple, edge_weight_class, map_equal_weight_edges, polygon_weight, triangle_weight

DEFAULT_MAX_MULTIPLE = 4
DEFAULT_TRIANGULATION_STATES = 20000


def gmaps_between_triangles(S: Triangle, T: Triangle) -> Iterator[GMap]:
    """All G-maps sending the vertex set of S onto that of T."""
    a, b, c = S.vertices
    ux, uy = b.x - a.x, b.y - a.y
    vx, vy = c.x - a.x, c.y - a.y
    det = ux * vy - vx * uy
    for x, y, z in ((0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)):
        X, Y, Z = T.vertices[x], T.vertices[y], T.vertices[z]
        px, py = Y.x - X.x, Y.y - X.y
        qx, qy = Z.x - X.x, Z.y - X.y
        # U [u v] = [p q]  =>  U = [p q] [u v]^-1
        m = ((px * vy - qx * uy) / det, (qx * ux - px * vx) / det)
        n = ((py * vy - qy * uy) / det, (qy * ux - py * vx) / det)
        entries = (m[0], m[1], n[0], n[1])
        if any(e.denominator != 1 for e in entries):
            continue
        U = ((int(m[0]), int(m[1])), (int(n[0]), int(n[1])))
        if U[0][0] * U[1][1] - U[0][1] * U[1][0] not in (1, -1):
            continue
        tx = X.x - (U[0][0] * a.x + U[0][1] * a.y)
        ty = X.y - (U[1][0] * a.x + U[1][1] * a.y)
        if tx.denominator == 1 and ty.denominator == 1:
            yield GMap(U, (int(tx), int(ty)))


def map_equal_weight_triangles(S: Triangle, T: Triangle) -> GMap:
    for g in gmaps_between_triangles(S, T):
        return g
    raise CompatibilityViolated(f"no G-map sends {S} onto {T}")


# ---------------------------------------------------------------------------


@dataclass
class FacetMap:
    """Source pieces (open triangles tiling the source) with G-maps whose images tile the target."""

    source: Region
    target: Region
    level: int
    pieces: list[tuple[Triangle, GMap]]
    flips: int = 0

    def images(self) -> list[Triangle]:
        return [t.mapped(g) for t, g in self.pieces]


def _match_by_weight(cells: Sequence[tuple[Triangle, object]], targets: Sequence[Triangle], d: int):
    """Pair cells with target facets of equal weight, lexicographically within each weight."""
    by_weight: dict[WeightTriple, list] = defaultdict(list)
    for t in sorted(targets):
        by_weight[triangle_weight(t, d)].append(t)
    out = []
    for tri, payload in sorted(cells, key=lambda c: c[0]):
        bucket = by_weight.get(triangle_weight(tri, d))
        if not bucket:
            raise PathInvalid(f"no target facet left with the weight of {tri}")
        out.append((tri, payload, bucket.pop(0)))
    return out


def facet_map_from_triangulations(P: Region, Q: Region, TP: Triangulation, TQ: Triangulation) -> FacetMap:
    """Facet map between two d-minimal triangulations with equal weight multisets."""
    d = TP.level
    pieces = []
    for src, _, dst in _match_by_weight([(f, None) for f in TP.facets], TQ.facets, d):
        pieces.append((src, map_equal_weight_triangles(src, dst)))
    return FacetMap(P, Q, d, pieces)


@dataclass
class _Cell:
    triangle: Triangle
    pieces: list[tuple[Triangle, GMap]]  # (source triangle, map into this cell's plane)


def _cut(pieces, g_extra: GMap, A: Point, C: Point, D: Point):
    """Cut the images of ``pieces`` (after ``g_extra``) by the line CD; return the parts on A's side and the rest."""
    side_a = cross(C, D, A) > 0
    near, far = [], []
    for src, g in pieces:
        h = g_extra.compose(g)
        img = src.mapped(h)
        left, right = split_convex(list(img.vertices), C, D)
        hinv = h.inverse()
        for poly, is_left in ((left, True), (right, False)):
            for part in fan_triangles(poly):
                piece = (part.mapped(hinv), h)
                (near if is_left == side_a else far).append(piece)
    return near, far


def _realise_flip(a: _Cell, b: _Cell, step: FlipStep, d: int) -> Optional[tuple[_Cell, _Cell]]:
    """Exchange the diagonal of the parallelogram built on cell ``a`` and a copy of cell ``b``."""
    target = sorted(step.after)
    wb = triangle_weight(b.triangle, d)
    for e in a.triangle.edges():
        A, B = e.start, e.end
        C = next(v for v in a.triangle.vertices if v not in (A, B))
        Dp = Point(A.x + B.x - C.x, A.y + B.y - C.y)
        ref = Triangle(B, A, Dp)
        if triangle_weight(ref, d) != wb:
            continue
        S1, S2 = Triangle(A, Dp, C), Triangle(Dp, B, C)
        if sorted((triangle_weight(S1, d), triangle_weight(S2, d))) != target:
            continue
        h = map_equal_weight_triangles(b.triangle, ref)
        n1, f1 = _cut(a.pieces, GMap.identity(), A, C, Dp)
        n2, f2 = _cut(b.pieces, h, A, C, Dp)
        return _Cell(S1, n1 + n2), _Cell(S2, f1 + f2)
    return None


def facet_map_from_path(P: Region, Q: Region, d: int, path: Sequence[FlipStep], TP=None, TQ=None) -> FacetMap:
    """Replay a pseudo-flip path on cells carrying pieces of P, then match the cells with Q's facets."""
    TP = TP or minimal_triangulation(P, d)
    TQ = TQ or minimal_triangulation(Q, d)
    cells = [_Cell(f, [(f, GMap.identity())]) for f in TP.facets]
    for k, step in enumerate(path):
        wa, wb = step.before
        pick = None
        for i, c in enumerate(cells):
            if triangle_weight(c.triangle, d) != wa:
                continue
            for j, c2 in enumerate(cells):
                if j != i and triangle_weight(c2.triangle, d) == wb:
                    pick = (i, j)
                    break
            if pick:
                break
        if pick is None:
            raise PathInvalid(f"step {k}: no cells of weights {wa} and {wb}")
        i, j = pick
        res = _realise_flip(cells[i], cells[j], step, d)
        if res is None:
            raise PathInvalid(f"step {k}: {step} cannot be realised geometrically")
        cells = [c for m, c in enumerate(cells) if m not in (i, j)] + list(res)
    pieces = []
    for cell_tri, cell, dst in _match_by_weight([(c.triangle, c) for c in cells], TQ.facets, d):
        k = map_equal_weight_triangles(cell_tri, dst)
        pieces.extend((src, k.compose(g)) for src, g in cell.pieces)
    return FacetMap(P, Q, d, pieces, flips=len(path))


# ---------------------------------------------------------------------------


def _weights_of(facets, d, cache) -> Counter:
    out = Counter()
    for f in facets:
        w = cache.get(f)
        if w is None:
            w = cache[f] = triangle_weight(f, d)
        out[w] += 1
    return out


def _distance(c: Counter, target: Counter) -> int:
    return sum(abs(c[k] - target[k]) for k in set(c) | set(target))


def search_matching_triangulation(
    T: Triangulation, target: PseudoTriangulation, max_states: int = DEFAULT_TRIANGULATION_STATES
) -> Optional[tuple[Triangulation, int]]:
    """Best-first search over diagonal exchanges of T for a triangulation with the target weight multiset.

    Returns the triangulation and the number of exchanges, or None when the
    state budget runs out.
    """
    d = T.level
    goal = target.counts
    cache: dict = {}
    start = T
    dist0 = _distance(_weights_of(T.facets, d, cache), goal)
    heap = [(dist0, 0, 0, start)]
    seen = {start.facets}
    tie = 0
    while heap:
        h, g, _, cur = heapq.heappop(heap)
        if h == 0:
            return cur, g
        for f1, f2 in flippable_pairs(cur):
            nxt = classical_flip(cur, f1, f2, check=False)
            if nxt.facets in seen:
                continue
            seen.add(nxt.facets)
            if len(seen) > max_states:
                return None
            tie += 1
            heapq.heappush(heap, (_distance(_weights_of(nxt.facets, d, cache), goal), g + 1, tie, nxt))
    return None


# ---------------------------------------------------------------------------


def _skeleton(triangles: Sequence[Triangle], D: int) -> tuple[list[Point], list[OrientedSegment]]:
    atoms = set()
    for t in triangles:
        for e in t.edges():
            atoms.update(segment_atoms(e.start, e.end, D, closed=True))
    points = sorted(a[1] for a in atoms if a[0] == "v")
    segs = sorted(OrientedSegment(a[1], a[2]) for a in atoms if a[0] == "e")
    return points, segs


def extend_facet_map(fm: FacetMap) -> Relation:
    """Complete a facet map with bijections of the remaining points and open edges."""
    sources = [t for t, _ in fm.pieces]
    images = fm.images()
    D = lcm(fm.level, *(denominator_of(t.vertices) for t in sources))
    rel = Relation([Piece.of("triangle", t.vertices, g) for t, g in fm.pieces])

    pts_p, segs_p = _skeleton(sources, D)
    pts_q, segs_q = _skeleton(images, D)

    by_level_p, by_level_q = defaultdict(list), defaultdict(list)
    for p in pts_p:
        by_level_p[primitivity_level(p)].append(p)
    for q in pts_q:
        by_level_q[primitivity_level(q)].append(q)
    if {k: len(v) for k, v in by_level_p.items()} != {k: len(v) for k, v in by_level_q.items()}:
        raise CompatibilityViolated("vertex counts per primitivity level differ")
    for n in sorted(by_level_p):
        for p, q in zip(by_level_p[n], by_level_q[n]):
            rel.pieces.append(Piece.of("point", (p,), map_primitive_point(p, q)))

    by_class_p, by_class_q = defaultdict(list), defaultdict(list)
    for s in segs_p:
        by_class_p[edge_weight_class(s, D)].append(s)
    for s in segs_q:
        by_class_q[edge_weight_class(s, D)].append(s)
    if {k: len(v) for k, v in by_class_p.items()} != {k: len(v) for k, v in by_class_q.items()}:
        raise CompatibilityViolated("edge counts per Weight class differ")
    for cls in sorted(by_class_p):
        for s, t in zip(by_class_p[cls], by_class_q[cls]):
            rel.pieces.append(Piece.of("segment", (s.start, s.end), map_equal_weight_edges(s, t, D)))
    return rel


# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    outcome: str  # "yes", "no", "inconclusive"
    level: Optional[int] = None
    criterion: Optional[str] = None  # "vertex" or "edge" for a no
    relation: Optional[Relation] = None
    report: Optional[Report] = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"outcome": self.outcome}
        if self.level is not None:
            out["level"] = self.level
        if self.criterion is not None:
            out["criterion"] = self.criterion
        if self.relation is not None:
            out["pieces"] = self.relation.summary()
        out["notes"] = list(self.notes)
        return out


def weights_equal(P: Region, Q: Region, d: int) -> bool:
    return polygon_weight(components(P), d).counts == polygon_weight(components(Q), d).counts


def _relation_at(P: Region, Q: Region, d: int, max_states: int, notes: list[str]) -> Optional[Relation]:
    TP, TQ = minimal_triangulation(P, d), minimal_triangulation(Q, d)
    tp = PseudoTriangulation.of(d, (triangle_weight(f, d) for f in TP.facets))
    tq = PseudoTriangulation.of(d, (triangle_weight(f, d) for f in TQ.facets))
    if len(tp) != len(tq):
        notes.append(f"d'={d}: facet counts differ")
        return None
    budget = min(max_states, DEFAULT_TRIANGULATION_STATES)
    found = search_matching_triangulation(TQ, tp, budget)
    if found is not None:
        TQ2, n = found
        notes.append(f"d'={d}: target retriangulated with {n} diagonal exchanges")
        return extend_facet_map(facet_map_from_triangulations(P, Q, TP, TQ2))
    found = search_matching_triangulation(TP, tq, budget)
    if found is not None:
        TP2, n = found
        notes.append(f"d'={d}: source retriangulated with {n} diagonal exchanges")
        return extend_facet_map(facet_map_from_triangulations(P, Q, TP2, TQ))
    try:
        path = find_flip_path(tp, tq, max_states)
    except Truncated:
        notes.append(f"d'={d}: pseudo-flip search truncated after {max_states} states")
        return None
    if path is None:
        notes.append(f"d'={d}: initial pseudo-triangulations are not flip-equivalent")
        return None
    notes.append(f"d'={d}: replaying a pseudo-flip path of length {len(path)}")
    return extend_facet_map(facet_map_from_path(P, Q, d, path, TP, TQ))


def decide_equidecomposable(
    P: Region,
    Q: Region,
    max_multiple: int = DEFAULT_MAX_MULTIPLE,
    max_states: int = DEFAULT_MAX_STATES,
    workers: int = 1,
) -> Verdict:
    """Check vertex, then edge, then facet compatibility at ``d' = d, 2d, ...``.

    A yes always carries a relation that passed :func:`verify_relation`.
    """
    d = lcm(region_denominator(P), region_denominator(Q))
    if not vertex_compatible(P, Q, workers):
        return Verdict("no", criterion="vertex", notes=["Ehrhart quasi-polynomials differ"])
    if not weights_equal(P, Q, d):
        return Verdict("no", criterion="edge", notes=[f"boundary Weights differ at d={d}"])
    notes: list[str] = []
    for m in range(1, max_multiple + 1):
        try:
            rel = _relation_at(P, Q, m * d, max_states, notes)
        except (CompatibilityViolated, PathInvalid) as exc:
            notes.append(f"d'={m * d}: construction failed: {exc}")
            continue
        if rel is None:
            continue
        report = verify_relation(P, Q, rel)
        if not report.ok:  # pragma: no cover - would be a construction bug
            notes.append(f"d'={m * d}: constructed relation failed verification")
            continue
        return Verdict("yes", level=m * d, relation=rel, report=report, notes=notes)
    return Verdict("inconclusive", level=max_multiple * d, notes=notes)
