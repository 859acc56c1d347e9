"""Random equidecomposable pairs with a known relation, for testing the decision procedure.

A pair is built by cut-and-reglue moves on a minimal triangulation: cut
along an interior edge whose endpoints both lie on the boundary, move the
smaller side by a G-map and glue it back along a boundary edge of the same
Weight class.  Cutting along one edge and sealing along an edge of the same
class keeps the vertex levels and edge classes of the skeleton intact, so
the facet bijection always extends to a full relation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .ehrhart import Region
from .equidecompose import FacetMap, extend_facet_map
from .errors import InvalidPolygon
from .geometry import GMap, OrientedSegment, Point, Polygon, Triangle, cross, random_gmap
from .relation import Relation
from .triangulation import edge_key, minimal_triangulation
from .weights import anchored_segment_maps, edge_weight_class


@dataclass
class Synthesis:
    source: Region
    target: Region
    level: int
    relation: Relation
    moves: int  # cut-and-reglue moves applied; 0 means the target is g(P) for a single g


def _boundary_loop(facets) -> Optional[list[Point]]:
    """Counterclockwise boundary of a triangulated disk, or None if it is not a single simple loop."""
    directed = set()
    for t in facets:
        for e in t.edges():
            directed.add((e.start, e.end))
    nxt: dict[Point, Point] = {}
    for a, b in directed:
        if (b, a) in directed:
            continue
        if a in nxt:
            return None
        nxt[a] = b
    if not nxt:
        return None
    start = min(nxt)
    loop = [start]
    while True:
        p = nxt[loop[-1]]
        if p == start:
            break
        if len(loop) > len(nxt):
            return None
        loop.append(p)
    if len(loop) != len(nxt):
        return None
    return loop


def _drop_straight(loop: list[Point]) -> list[Point]:
    n = len(loop)
    return [loop[i] for i in range(n) if cross(loop[i - 1], loop[i], loop[(i + 1) % n]) != 0]


def _split(facets: list[Triangle], cut: tuple[Point, Point]) -> list[Triangle]:
    """Facets reachable from the first facet on the cut without crossing the cut."""
    by_edge: dict = {}
    for t in facets:
        for e in t.edges():
            by_edge.setdefault(edge_key(*e), []).append(t)
    start = by_edge[cut][0]
    seen = {start}
    stack = [start]
    while stack:
        t = stack.pop()
        for e in t.edges():
            k = edge_key(*e)
            if k == cut:
                continue
            for u in by_edge[k]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return sorted(seen)


def _extent(facets) -> Fraction:
    return max(max(abs(v.x), abs(v.y)) for t in facets for v in t.vertices)


def _move(state: dict, d: int, rng: random.Random) -> Optional[dict]:
    """One cut-and-reglue move; ``state`` maps current facets to (source facet, G-map)."""
    facets = sorted(state)
    loop = _boundary_loop(facets)
    on_boundary = set(loop)
    boundary = {(loop[i], loop[(i + 1) % len(loop)]) for i in range(len(loop))}
    counted: dict = {}
    for t in facets:
        for e in t.edges():
            k = edge_key(*e)
            counted[k] = counted.get(k, 0) + 1
    cuts = [k for k, m in sorted(counted.items()) if m == 2 and k[0] in on_boundary and k[1] in on_boundary]
    rng.shuffle(cuts)
    for cut in cuts:
        side = _split(facets, cut)
        if len(side) == len(facets):
            continue
        B = side if 2 * len(side) <= len(facets) else [t for t in facets if t not in set(side)]
        A = [t for t in facets if t not in set(B)]
        cls = edge_weight_class(OrientedSegment(*cut), d)
        b_edges = [OrientedSegment(*e) for e in sorted(boundary) if any(e in {(x.start, x.end) for x in t.edges()} for t in B)]
        a_edges = [OrientedSegment(*e) for e in sorted(boundary) if not any(e in {(x.start, x.end) for x in t.edges()} for t in B)]
        fs = [f for f in b_edges if edge_weight_class(f, d) == cls]
        gs = [f for f in a_edges if edge_weight_class(f, d) == cls]
        rng.shuffle(fs)
        rng.shuffle(gs)
        a_vertices = {v for t in A for v in t.vertices}
        for f in fs:
            for f2 in gs:
                options = list(anchored_segment_maps(f, f2.reversed(), d)) + list(anchored_segment_maps(f, f2, d))
                rng.shuffle(options)
                # compact placements first, so repeated moves do not inflate coordinates
                options.sort(key=lambda g: _extent(t.mapped(g) for t in B))
                for g in options:
                    moved = [t.mapped(g) for t in B]
                    shared = a_vertices & {v for t in moved for v in t.vertices}
                    if shared != {f2.start, f2.end}:
                        continue
                    loop2 = _boundary_loop(A + moved)
                    if loop2 is None:
                        continue
                    try:
                        Qc = Polygon(tuple(loop2))
                    except InvalidPolygon:
                        continue
                    if Qc.area != sum((t.area for t in A + moved), Fraction(0)):
                        continue
                    new_state = {t: state[t] for t in A}
                    for t, m in zip(B, moved):
                        src, h = state[t]
                        new_state[m] = (src, g.compose(h))
                    return new_state
    return None


def synthesize_equidecomposable_pair(
    P: Region, d: int, seed: int, identity: bool = False, moves: int = 3, bound: int = 3
) -> Synthesis:
    """Build a target equidecomposable with P at level ``d`` together with a ground-truth relation.

    ``identity=True`` returns ``(P, identity relation)``.  Otherwise up to
    ``moves`` cut-and-reglue moves are applied, followed by one random G-map
    of the whole result.  If no move is possible the target is just the
    image of P under that G-map.
    """
    rng = random.Random(seed)
    T = minimal_triangulation(P, d)
    state = {f: (f, GMap.identity()) for f in T.facets}
    if identity:
        return Synthesis(P, P, d, extend_facet_map(FacetMap(P, P, d, list(state.values()))), 0)
    done = 0
    for _ in range(moves):
        nxt = _move(state, d, rng)
        if nxt is None:
            break
        state, done = nxt, done + 1
    g = random_gmap(rng, bound)
    state = {t.mapped(g): (src, g.compose(h)) for t, (src, h) in state.items()}
    Q = Polygon(tuple(_drop_straight(_boundary_loop(sorted(state)))))
    fm = FacetMap(P, Q, d, [state[t] for t in sorted(state)])
    return Synthesis(P, Q, d, extend_facet_map(fm), done)


def random_polygon(rng: random.Random, d: int, size: int = 2, max_vertices: int = 6, max_area: Fraction | None = None) -> Polygon:
    """Random simple polygon with vertices in ``L_d`` inside ``[0, size]^2`` and denominator exactly d."""
    while True:
        n = rng.randint(3, max_vertices)
        pts = [(Fraction(rng.randint(0, size * d), d), Fraction(rng.randint(0, size * d), d)) for _ in range(n)]
        try:
            P = Polygon(tuple(pts))
        except (InvalidPolygon, ValueError):
            continue
        if P.denominator != d or (max_area is not None and P.area > max_area):
            continue
        return P
