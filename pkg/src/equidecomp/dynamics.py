"""Pseudo-flips on weight triples, the reachable sets they generate, and the weight-class graph."""

from __future__ import annotations

import heapq
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import permutations
from math import gcd
from typing import Iterable, Optional

from .errors import CapExceeded, InvalidPairing, Truncated
from .ehrhart import Region
from .triangulation import minimal_triangulation
from .weights import WeightTriple, ext_gcd, triangle_weight

DEFAULT_MAX_STATES = 10**6
WEIGHT_CLASS_CAP = 64


@dataclass(frozen=True, order=True)
class FlipPairing:
    """Matching of the residues of two triples: ``u`` against ``x`` (the shared edge), ``v`` against ``y`` and ``w`` against ``z``."""

    u: int
    x: int
    v: int
    y: int
    w: int
    z: int
    modulus: int

    def holds(self) -> bool:
        d = self.modulus
        return (self.u + self.x) % d == 0 and (self.v + self.y - 1) % d == 0 and (self.w + self.z - 1) % d == 0


def pseudo_flip_pairings(w1: WeightTriple, w2: WeightTriple) -> list[FlipPairing]:
    """Every pairing of the residues of ``w1`` and ``w2`` that satisfies the three congruences."""
    d = w1.modulus
    if w2.modulus != d:
        raise ValueError("triples have different moduli")
    found = set()
    for u, v, w in set(permutations(w1.residues)):
        for x, y, z in set(permutations(w2.residues)):
            p = FlipPairing(u, x, v, y, w, z, d)
            if p.holds():
                # (v, y) and (w, z) play symmetric roles
                if (v, y) > (w, z):
                    p = FlipPairing(u, x, w, z, v, y, d)
                found.add(p)
    return sorted(found)


def pseudo_flip(w1: WeightTriple, w2: WeightTriple, pairing: FlipPairing) -> tuple[WeightTriple, WeightTriple]:
    d = w1.modulus
    p = pairing
    ok = (
        p.modulus == d
        and p.holds()
        and sorted(r % d for r in (p.u, p.v, p.w)) == list(w1.residues)
        and sorted(r % d for r in (p.x, p.y, p.z)) == list(w2.residues)
    )
    if not ok:
        raise InvalidPairing(f"{pairing} is not a pairing of {w1} and {w2}")
    v, w = p.v, p.w
    return WeightTriple((v, 1 - w, w - v), d), WeightTriple((w, 1 - v, v - w), d)


def flip_results(w1: WeightTriple, w2: WeightTriple) -> list[tuple[WeightTriple, WeightTriple]]:
    """Distinct unordered outcomes of all pairings of ``w1`` with ``w2``."""
    out = set()
    for p in pseudo_flip_pairings(w1, w2):
        a, b = pseudo_flip(w1, w2, p)
        out.add((a, b) if a <= b else (b, a))
    return sorted(out)


# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class PseudoTriangulation:
    """Multiset of weight triples, stored sorted."""

    modulus: int
    triples: tuple[WeightTriple, ...]

    def __post_init__(self):
        if any(t.modulus != self.modulus for t in self.triples):
            raise ValueError("all triples must share the modulus")
        object.__setattr__(self, "triples", tuple(sorted(self.triples)))

    @classmethod
    def of(cls, d: int, triples: Iterable[WeightTriple]) -> PseudoTriangulation:
        return cls(d, tuple(triples))

    def __len__(self) -> int:
        return len(self.triples)

    @property
    def counts(self) -> Counter:
        return Counter(self.triples)

    def residue_sum(self) -> int:
        return sum(sum(t.residues) for t in self.triples) % self.modulus


def initial_pseudo_triangulation(P: Region, d: int, variant: int = 0) -> PseudoTriangulation:
    T = minimal_triangulation(P, d, variant)
    return PseudoTriangulation.of(d, (triangle_weight(f, d) for f in T.facets))


@dataclass(frozen=True)
class FlipStep:
    """One pseudo-flip: the pair ``before`` is replaced by the pair ``after``."""

    before: tuple[WeightTriple, WeightTriple]
    after: tuple[WeightTriple, WeightTriple]

    def reversed(self) -> FlipStep:
        return FlipStep(self.after, self.before)


class _Space:
    """Integer encoding of pseudo-triangulations as sorted ``(class code, count)`` tuples."""

    def __init__(self, d: int):
        self.d = d
        self.triples: dict[int, WeightTriple] = {}
        self._moves: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def code(self, t: WeightTriple) -> int:
        a, b, c = t.residues
        k = (a * self.d + b) * self.d + c
        self.triples.setdefault(k, t)
        return k

    def encode(self, pt: PseudoTriangulation) -> tuple:
        return tuple(sorted(Counter(self.code(t) for t in pt.triples).items()))

    def decode(self, state: tuple) -> PseudoTriangulation:
        return PseudoTriangulation.of(self.d, (self.triples[k] for k, m in state for _ in range(m)))

    def moves(self, i: int, j: int) -> list[tuple[int, int]]:
        key = (i, j)
        if key not in self._moves:
            out = []
            for a, b in flip_results(self.triples[i], self.triples[j]):
                ka, kb = sorted((self.code(a), self.code(b)))
                if (ka, kb) != key:
                    out.append((ka, kb))
            self._moves[key] = out
        return self._moves[key]

    def neighbours(self, state: tuple):
        items = list(state)
        for s, (i, mi) in enumerate(items):
            for j, mj in items[s:]:
                if i == j and mi < 2:
                    continue
                for a, b in self.moves(i, j):
                    c = dict(state)
                    for k in (i, j):
                        c[k] -= 1
                    for k in (a, b):
                        c[k] = c.get(k, 0) + 1
                    yield tuple(sorted((k, m) for k, m in c.items() if m)), (i, j, a, b)

    def step(self, move) -> FlipStep:
        i, j, a, b = move
        t = self.triples
        return FlipStep((t[i], t[j]), (t[a], t[b]))


@dataclass
class ReachabilityResult:
    seed: PseudoTriangulation
    reachable: set = field(default_factory=set)
    predecessor: dict = field(default_factory=dict)
    truncated: bool = False

    def path_to(self, target: PseudoTriangulation) -> list[FlipStep]:
        if target not in self.reachable:
            raise KeyError("target was not reached")
        steps = []
        while target != self.seed:
            target, step = self.predecessor[target]
            steps.append(step)
        return steps[::-1]


def dynamics_reachable(
    seed: PseudoTriangulation, max_states: int = DEFAULT_MAX_STATES, max_depth: Optional[int] = None
) -> ReachabilityResult:
    """Breadth-first closure of ``seed`` under pseudo-flips."""
    space = _Space(seed.modulus)
    start = space.encode(seed)
    depth = {start: 0}
    pred: dict = {}
    queue = deque([start])
    truncated = False
    while queue:
        s = queue.popleft()
        if max_depth is not None and depth[s] >= max_depth:
            truncated = truncated or any(n not in depth for n, _ in space.neighbours(s))
            continue
        for n, move in space.neighbours(s):
            if n in depth:
                continue
            if len(depth) >= max_states:
                truncated = True
                break
            depth[n] = depth[s] + 1
            pred[n] = (s, move)
            queue.append(n)
        if truncated and len(depth) >= max_states:
            break
    result = ReachabilityResult(seed, truncated=truncated)
    decoded = {s: space.decode(s) for s in depth}
    result.reachable = set(decoded.values())
    result.predecessor = {decoded[n]: (decoded[s], space.step(m)) for n, (s, m) in pred.items()}
    return result


def find_flip_path(
    source: PseudoTriangulation, target: PseudoTriangulation, max_states: int = DEFAULT_MAX_STATES
) -> Optional[list[FlipStep]]:
    """A pseudo-flip sequence from ``source`` to ``target``, or None if none exists.

    A bidirectional breadth-first search (pseudo-flips are reversible) looks
    for a shortest path within a tenth of the budget; after that a
    best-first search ordered by the L1 distance between class counts takes
    over.  Either search exhausting the component proves there is no path.
    Raises Truncated once ``max_states`` states have been seen.
    """
    if source.modulus != target.modulus:
        raise ValueError("moduli differ")
    if len(source) != len(target) or source.residue_sum() != target.residue_sum():
        return None
    space = _Space(source.modulus)
    a, b = space.encode(source), space.encode(target)
    if a == b:
        return []
    try:
        return _bidirectional(space, a, b, max(1, max_states // 10))
    except Truncated:
        pass
    return _best_first(space, a, b, max_states)


def _bidirectional(space: _Space, a, b, max_states: int):
    seen = [{a: None}, {b: None}]
    frontier = [[a], [b]]
    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        here, there = seen[side], seen[1 - side]
        nxt = []
        for s in frontier[side]:
            for n, move in space.neighbours(s):
                if n in here:
                    continue
                here[n] = (s, move)
                if n in there:
                    return _join(space, seen, n)
                nxt.append(n)
                if len(seen[0]) + len(seen[1]) > max_states:
                    raise Truncated(f"no path found within {max_states} states")
        frontier[side] = nxt
    return None


def _l1(state, goal: dict) -> int:
    c = dict(state)
    return sum(abs(c.get(k, 0) - goal.get(k, 0)) for k in set(c) | set(goal))


def _best_first(space: _Space, a, b, max_states: int):
    goal = dict(b)
    seen = {a: None}
    heap = [(_l1(a, goal), 0, a)]
    while heap:
        _, depth, s = heapq.heappop(heap)
        for n, move in space.neighbours(s):
            if n in seen:
                continue
            seen[n] = (s, move)
            if n == b:
                steps = []
                while seen[n] is not None:
                    n, mv = seen[n]
                    steps.append(space.step(mv))
                return steps[::-1]
            if len(seen) > max_states:
                raise Truncated(f"no path found within {max_states} states")
            heapq.heappush(heap, (_l1(n, goal), depth + 1, n))
    return None


def _join(space: _Space, seen, meet) -> list[FlipStep]:
    forward = []
    s = meet
    while seen[0][s] is not None:
        s, move = seen[0][s]
        forward.append(space.step(move))
    forward.reverse()
    s = meet
    while seen[1][s] is not None:
        s, move = seen[1][s]
        # recorded moves lead away from the target; replay them backwards
        forward.append(space.step(move).reversed())
    return forward


def apply_steps(pt: PseudoTriangulation, steps: Iterable[FlipStep]) -> PseudoTriangulation:
    counts = pt.counts
    for st in steps:
        for t in st.before:
            if counts[t] <= 0:
                raise ValueError(f"step {st} removes a triple that is not present")
            counts[t] -= 1
        counts.update(st.after)
    return PseudoTriangulation.of(pt.modulus, counts.elements())


@dataclass
class DynamicsResult:
    equal: bool
    path: Optional[list[FlipStep]]
    source: PseudoTriangulation
    target: PseudoTriangulation


def dynamics_equal(P: Region, Q: Region, d: int, max_states: int = DEFAULT_MAX_STATES) -> DynamicsResult:
    s, t = initial_pseudo_triangulation(P, d), initial_pseudo_triangulation(Q, d)
    path = find_flip_path(s, t, max_states)
    return DynamicsResult(path is not None, path, s, t)


# ---------------------------------------------------------------------------


def _box_range(c: int, e: int, n: int) -> tuple[int, int]:
    """Integers ``t`` with ``0 <= c + t*e < n``, as an inclusive range."""
    if e == 0:
        return (-(10**9), 10**9) if 0 <= c < n else (1, 0)
    lo, hi = -c, n - 1 - c
    if e < 0:
        lo, hi, e = -hi, -lo, -e
    return -((-lo) // e), hi // e


def enumerate_triangle_weight_classes(d: int, cap: int = WEIGHT_CLASS_CAP) -> list[WeightTriple]:
    """Weight triples of all d-minimal triangles with vertices in ``[0, 2)^2``.

    Triangles are generated as ``a, a+e, a+f`` on the scaled lattice with
    ``det(e, f) = 1``; for each primitive ``e`` the valid ``f`` form the
    line ``f0 + t e``.
    """
    if d > cap:
        raise CapExceeded(f"d={d} exceeds the enumeration cap {cap}")
    n = 2 * d
    found = set()
    for ax in range(n):
        for ay in range(n):
            for bx in range(n):
                for by in range(n):
                    ex, ey = bx - ax, by - ay
                    if gcd(ex, ey) != 1:
                        continue
                    _, x, y = ext_gcd(ex, ey)
                    f0x, f0y = -y, x
                    lo, hi = _box_range(ax + f0x, ex, n)
                    lo2, hi2 = _box_range(ay + f0y, ey, n)
                    for t in range(max(lo, lo2), min(hi, hi2) + 1):
                        cx, cy = ax + f0x + t * ex, ay + f0y + t * ey
                        w = ((ax * by - bx * ay) % d, (bx * cy - cx * by) % d, (cx * ay - ax * cy) % d)
                        found.add(tuple(sorted(w)))
    return [WeightTriple(w, d) for w in sorted(found)]


@dataclass
class WeightClassGraph:
    modulus: int
    vertices: list[WeightTriple]
    # (w1, w2) with w1 <= w2  ->  list of (pairing, resulting unordered pair)
    edges: dict

    def neighbours(self, w: WeightTriple) -> set[WeightTriple]:
        out = set()
        for a, b in self.edges:
            if a == w and b != w:
                out.add(b)
            elif b == w and a != w:
                out.add(a)
        return out

    def loops(self) -> list[WeightTriple]:
        return sorted(a for a, b in self.edges if a == b)

    def max_degree(self) -> int:
        return max((len(self.neighbours(w)) for w in self.vertices), default=0)

    def to_dot(self) -> str:
        names = {w: f"v{i}" for i, w in enumerate(self.vertices)}
        lines = [f"graph G{self.modulus} {{"]
        for w in self.vertices:
            lines.append(f'  {names[w]} [label="{w}"];')
        for (a, b), labels in sorted(self.edges.items()):
            results = sorted({r for _, r in labels})
            text = " | ".join(f"{r1},{r2}" for r1, r2 in results)
            lines.append(f'  {names[a]} -- {names[b]} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def weight_class_graph(d: int, cap: int = WEIGHT_CLASS_CAP) -> WeightClassGraph:
    verts = enumerate_triangle_weight_classes(d, cap)
    edges = {}
    for i, a in enumerate(verts):
        for b in verts[i:]:
            labels = []
            for p in pseudo_flip_pairings(a, b):
                r1, r2 = pseudo_flip(a, b, p)
                labels.append((p, (r1, r2) if r1 <= r2 else (r2, r1)))
            if labels:
                edges[(a, b)] = labels
    return WeightClassGraph(d, verts, edges)
