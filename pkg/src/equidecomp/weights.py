"""Edge and triangle weights mod d, edge Weight classes and the maps between them."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Sequence

from .errors import (
    ClassMismatch,
    DenominatorMismatch,
    NotInvertibleModD,
    NotMinimal,
    NotPrimitive,
    PreconditionViolated,
    WeightMismatch,
)
from .geometry import (
    GMap,
    OrientedSegment,
    Point,
    Polygon,
    Triangle,
    in_lattice,
    is_minimal_segment,
    is_minimal_triangle,
    lattice_points_on_segment,
    scaled,
    unscaled,
)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def divisors(n: int) -> list[int]:
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def is_unit(r: int, d: int) -> bool:
    return gcd(r, d) == 1


# ---------------------------------------------------------------------------
# weights


def edge_weight(E: OrientedSegment, d: int) -> int:
    """Weight of an oriented d-minimal edge: ``det[d*p | d*q] mod d``."""
    if not is_minimal_segment(E, d):
        raise NotMinimal(f"{E} is not {d}-minimal")
    w, x = scaled(E.start, d)
    y, z = scaled(E.end, d)
    return (w * z - y * x) % d


@dataclass(frozen=True, order=True)
class WeightTriple:
    """Unordered triple of edge weights of a counterclockwise d-minimal triangle."""

    residues: tuple[int, int, int]
    modulus: int

    def __post_init__(self):
        d = self.modulus
        res = tuple(sorted(r % d for r in self.residues))
        if len(res) != 3:
            raise ValueError("a weight triple has exactly three residues")
        if sum(res) % d != 1 % d:
            raise ValueError(f"residues {res} do not sum to 1 mod {d}")
        object.__setattr__(self, "residues", res)

    @classmethod
    def of(cls, values: Iterable[int], d: int) -> WeightTriple:
        return cls(tuple(values), d)

    def __iter__(self):
        return iter(self.residues)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.residues)) + "}"


def triangle_weight(T: Triangle, d: int) -> WeightTriple:
    if not is_minimal_triangle(T, d):
        raise NotMinimal(f"{T} is not {d}-minimal")
    return WeightTriple(tuple(edge_weight(e, d) for e in T.edges()), d)


# ---------------------------------------------------------------------------
# number theory behind the constructive maps


def _prime_factors(n: int) -> list[int]:
    """Prime factors of ``|n|`` with multiplicity."""
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def coprime_shift(a: int, b: int, d: int) -> int:
    """Find ``q`` with ``gcd(a + q*d, b) == 1``, given ``gcd(gcd(a, b), d) == 1``.

    ``q = 0`` is returned when ``a`` and ``b`` are already coprime; otherwise
    the prime-splitting construction is used, validated, and backed up by a
    search over one full period of ``q mod |b|``.
    """
    if gcd(gcd(a, b), d) != 1:
        raise PreconditionViolated(f"gcd(gcd({a}, {b}), {d}) != 1")
    if gcd(a, b) == 1:
        return 0
    if b == 0:
        # gcd(a + q d, 0) = |a + q d| can only be 1 when a = +-1 mod d
        for target in (1, -1):
            if (target - a) % d == 0:
                return (target - a) // d
        raise PreconditionViolated(f"no q makes |{a} + q*{d}| equal to 1")
    k = gcd(a, b)
    n = b // k
    n_prime = 1
    for s in _prime_factors(n):
        if k % s == 0:
            n_prime *= s
    q = n // n_prime
    if gcd(a + q * d, b) == 1:
        return q
    for q in range(abs(b)):  # pragma: no cover - the construction above always works
        if gcd(a + q * d, b) == 1:
            return q
    raise PreconditionViolated("unreachable")  # pragma: no cover


def _inverse_mod(r: int, d: int) -> int:
    g, x, _ = ext_gcd(r % d, d)
    if g != 1:
        raise NotInvertibleModD(f"{r} is not a unit mod {d}")
    return x % d


Matrix = tuple[tuple[int, int], tuple[int, int]]


def det2(M: Matrix) -> int:
    (a, b), (c, d) = M
    return a * d - b * c


def lift_unimodular_mod_d(M: Matrix, d: int) -> Matrix:
    """Lift an integer matrix with ``det = +-1 (mod d)`` to ``GL_2(Z)`` without changing residues.

    Step 1 makes the bottom row coprime by shifting its first entry by a
    multiple of ``d``; step 2 corrects the top row with a Bezout solution.
    """
    (m11, m12), (m21, m22) = M
    det = det2(M)
    if det in (1, -1):
        return ((m11, m12), (m21, m22))
    if d == 1:
        sign = 1
    elif (det - 1) % d == 0:
        sign = 1
    elif (det + 1) % d == 0:
        sign = -1
    else:
        raise NotInvertibleModD(f"det {det} is not +-1 mod {d}")
    if m22 == 0:
        # coprime_shift cannot work against b = 0 unless m21 = +-1 mod d
        m22 = d
    m21 = m21 + coprime_shift(m21, m22, d) * d
    k, rem = divmod(m11 * m22 - m12 * m21 - sign, d)
    assert rem == 0
    g, x, y = ext_gcd(m22, m21)
    assert g == 1
    # n11*m22 - n12*m21 = -k
    n11, n12 = -k * x, k * y
    lifted = ((m11 + n11 * d, m12 + n12 * d), (m21, m22))
    assert det2(lifted) == sign
    return lifted


def basis_with_first_column(ex: int, ey: int) -> Matrix:
    """Integer matrix of det 1 whose first column is the primitive vector ``(ex, ey)``."""
    g, x, y = ext_gcd(ex, ey)
    if g != 1:
        raise ValueError(f"({ex}, {ey}) is not primitive")
    # ex*x + ey*y = 1  =>  det[[ex, -y], [ey, x]] = 1
    return (ex, -y), (ey, x)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    (a, b), (c, d) = A
    (e, f), (g, h) = B
    return (a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)


def mat_inv(A: Matrix) -> Matrix:
    (a, b), (c, d) = A
    s = det2(A)
    return (s * d, -s * b), (-s * c, s * a)


def mat_apply(A: Matrix, x: int, y: int) -> tuple[int, int]:
    (a, b), (c, d) = A
    return a * x + b * y, c * x + d * y


def _gmap_from_linear(U: Matrix, p: Point, p2: Point) -> GMap | None:
    """The G-map with linear part ``U`` sending ``p`` to ``p2``, if its translation is integral."""
    (a, b), (c, d) = U
    vx = p2.x - (a * p.x + b * p.y)
    vy = p2.y - (c * p.x + d * p.y)
    if vx.denominator != 1 or vy.denominator != 1:
        return None
    return GMap(U, (vx.numerator, vy.numerator))


def anchored_segment_maps(E: OrientedSegment, F: OrientedSegment, d: int) -> Iterator[GMap]:
    """All G-maps (one per residue class of the stabiliser parameter) with ``E.start -> F.start`` and ``E.end -> F.end``.

    Both segments must be d-minimal.  Every linear part sending the primitive
    direction ``e`` of E to that of F has the form ``B_f [[1, s], [0, sigma]] B_e^-1``;
    the translation is integral exactly when a congruence mod ``d`` holds.
    """
    px, py = scaled(E.start, d)
    qx, qy = scaled(E.end, d)
    rx, ry = scaled(F.start, d)
    sx, sy = scaled(F.end, d)
    Be = basis_with_first_column(qx - px, qy - py)
    Bf = basis_with_first_column(sx - rx, sy - ry)
    alpha, beta = mat_apply(mat_inv(Be), px, py)
    alpha2, beta2 = mat_apply(mat_inv(Bf), rx, ry)
    for sigma in (1, -1):
        if (sigma * beta - beta2) % d:
            continue
        # s * beta = alpha2 - alpha (mod d)
        g = gcd(beta, d)
        rhs = alpha2 - alpha
        if rhs % g:
            continue
        m = d // g
        s0 = ((rhs // g) * _inverse_mod(beta // g, m)) % m if m > 1 else 0
        for t in range(g):
            s = s0 + t * m
            U = mat_mul(mat_mul(Bf, ((1, s), (0, sigma))), mat_inv(Be))
            g_map = _gmap_from_linear(U, E.start, F.start)
            if g_map is not None:
                yield g_map


def map_primitive_segments(E: OrientedSegment, F: OrientedSegment, d: int) -> GMap:
    """A G-map sending E onto F with ``start -> start``.

    For d-primitive segments (unit weight) the residue class ``M = F E^-1 (mod d)``
    is lifted to ``GL_2(Z)``.  That lift fixes both endpoints only up to
    integer translation, so when the far endpoint misses, the exact
    stabiliser construction of :func:`anchored_segment_maps` is used.
    """
    for S in (E, F):
        if not is_minimal_segment(S, d):
            raise NotPrimitive(f"{S} is not {d}-minimal")
    wE, wF = edge_weight(E, d), edge_weight(F, d)
    if (wE - wF) % d and (wE + wF) % d:
        raise WeightMismatch(f"weights {wE} and {wF} differ by more than sign mod {d}")
    if is_unit(wE, d):
        w, x = scaled(E.start, d)
        y, z = scaled(E.end, d)
        w2, x2 = scaled(F.start, d)
        y2, z2 = scaled(F.end, d)
        inv = _inverse_mod(wE, d)
        A_adj = ((z, -y), (-x, w))
        M = mat_mul(((w2, y2), (x2, z2)), A_adj)
        M = tuple(tuple((e * inv) % d for e in row) for row in M)
        g = _gmap_from_linear(lift_unimodular_mod_d(M, d), E.start, F.start)
        if g is not None and g(E.end) == F.end:
            return g
    for g in anchored_segment_maps(E, F, d):
        return g
    raise NotPrimitive(f"no G-map sends {E} to {F} with these endpoints at level {d}")


# ---------------------------------------------------------------------------
# canonical forms of d-minimal edges


def primitive_hull(E: OrientedSegment, d: int) -> tuple[OrientedSegment, int]:
    """The unique k-primitive segment containing E, scanning ``l | d`` upwards."""
    if not is_minimal_segment(E, d):
        raise NotMinimal(f"{E} is not {d}-minimal")
    p, q = E.start, E.end
    step = Point(q.x - p.x, q.y - p.y)

    def at(t: int) -> Point:
        return Point(p.x + t * step.x, p.y + t * step.y)

    for ell in divisors(d):
        period = d // ell
        lo = next((t for t in range(0, -period, -1) if in_lattice(at(t), ell)), None)
        if lo is None:
            continue
        hi = lo + period
        hull = OrientedSegment(at(lo), at(hi))
        if is_unit(edge_weight(hull, ell), ell):
            return hull, ell
    raise AssertionError("the d-level segment itself is always a candidate")  # pragma: no cover


@dataclass(frozen=True, order=True)
class CanonicalEdge:
    """Representative of a G-class of d-minimal edges.

    It is the ``offset``-th d-minimal piece of the horizontal k-primitive
    segment from ``(0, residue/d)`` to ``(1/k, residue/d)``.
    """

    modulus: int
    residue: int
    level: int
    offset: int

    @property
    def segment(self) -> OrientedSegment:
        d, i, j = self.modulus, self.residue, self.offset
        return OrientedSegment(Point(Fraction(j, d), Fraction(i, d)), Point(Fraction(j + 1, d), Fraction(i, d)))


@dataclass(frozen=True, order=True)
class WeightClassEdge:
    """Weight ``(+-i, j)`` of a d-minimal edge; ``j`` is the canonical representative itself."""

    residue: int
    canonical: CanonicalEdge

    def __str__(self) -> str:
        c = self.canonical
        return f"(+-{self.residue}, k={c.level}, offset={c.offset})"


def _lex_positive(E: OrientedSegment) -> bool:
    dx, dy = E.end.x - E.start.x, E.end.y - E.start.y
    return dx > 0 or (dx == 0 and dy > 0)


def canonicalize_edge(E: OrientedSegment, d: int) -> tuple[CanonicalEdge, GMap]:
    """Canonical form of E together with a G-map sending E onto it."""
    w = edge_weight(E, d)
    i = min(w, (-w) % d)
    if w != i:
        E = E.reversed()
    elif (-w) % d == w and not _lex_positive(E):
        E = E.reversed()
    hull, k = primitive_hull(E, d)
    n = d // k
    span = hull.end.x - hull.start.x
    if span != 0:
        j = (E.start.x - hull.start.x) * n / span
    else:
        j = (E.start.y - hull.start.y) * n / (hull.end.y - hull.start.y)
    assert j.denominator == 1
    j = int(j)
    height = Fraction(i, d)
    target = OrientedSegment(Point(Fraction(0), height), Point(Fraction(1, k), height))
    forward = list(anchored_segment_maps(hull, target, k))
    backward = list(anchored_segment_maps(hull, target.reversed(), k))
    if not forward or not backward:  # pragma: no cover - every primitive segment can be straightened
        raise AssertionError(f"primitive hull {hull} cannot be straightened")
    offset = min(j, n - 1 - j)
    if j < n - 1 - j:
        candidates = forward
    elif j > n - 1 - j:
        candidates = backward
    else:
        candidates = forward + backward
    g = next((c for c in candidates if c.det == 1), candidates[0])
    canon = CanonicalEdge(d, i, k, offset)
    assert {g(E.start), g(E.end)} == set(canon.segment)
    return canon, g


def canonical_edge_form(E: OrientedSegment, d: int) -> CanonicalEdge:
    return canonicalize_edge(E, d)[0]


def edge_weight_class(E: OrientedSegment, d: int) -> WeightClassEdge:
    canon = canonical_edge_form(E, d)
    return WeightClassEdge(canon.residue, canon)


def map_equal_weight_edges(E: OrientedSegment, F: OrientedSegment, d: int) -> GMap:
    """A G-map with ``g(E) = F`` as sets, composed from the two canonicalising maps."""
    cE, gE = canonicalize_edge(E, d)
    cF, gF = canonicalize_edge(F, d)
    if cE != cF:
        raise ClassMismatch(f"{E} and {F} lie in different Weight classes")
    g = gF.inverse().compose(gE)
    assert {g(E.start), g(E.end)} == {F.start, F.end}
    return g


@dataclass(frozen=True)
class PolygonWeight:
    """Multiset of Weight classes of the d-minimal boundary edges."""

    modulus: int
    classes: tuple[tuple[WeightClassEdge, int], ...]

    @classmethod
    def from_counter(cls, d: int, counts: Counter) -> PolygonWeight:
        return cls(d, tuple(sorted(counts.items())))

    @property
    def counts(self) -> Counter:
        return Counter(dict(self.classes))

    @property
    def total(self) -> int:
        return sum(m for _, m in self.classes)


def boundary_minimal_edges(P: Polygon, d: int) -> list[OrientedSegment]:
    """Counterclockwise boundary of P cut into its d-minimal edges."""
    if d % P.denominator:
        raise DenominatorMismatch(f"denominator {P.denominator} does not divide {d}")
    out = []
    for side in P.edges():
        pts = lattice_points_on_segment(side.start, side.end, d)
        out.extend(OrientedSegment(a, b) for a, b in zip(pts, pts[1:]))
    return out


def polygon_weight(P: Polygon | Sequence[Polygon], d: int) -> PolygonWeight:
    parts = (P,) if isinstance(P, Polygon) else tuple(P)
    counts: Counter = Counter()
    for part in parts:
        counts.update(edge_weight_class(E, d) for E in boundary_minimal_edges(part, d))
    return PolygonWeight.from_counter(d, counts)


def enumerate_edge_classes(d: int) -> list[WeightClassEdge]:
    """Brute-force list of Weight classes: canonicalise every d-minimal edge with endpoints in ``[0, 2)^2``."""
    found = set()
    pts = [(x, y) for x in range(2 * d) for y in range(2 * d)]
    for px, py in pts:
        for qx, qy in pts:
            if (qx, qy) > (px, py) and gcd(qx - px, qy - py) == 1:
                found.add(edge_weight_class(OrientedSegment(unscaled(px, py, d), unscaled(qx, qy, d)), d))
    return sorted(found)


def weight_of_points(points: Sequence[Point], d: int) -> WeightTriple:
    """Weight of the d-minimal triangle with the given (unordered) vertices."""
    return triangle_weight(Triangle(*points), d)
