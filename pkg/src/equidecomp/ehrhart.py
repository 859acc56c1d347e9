"""Lattice point counts of dilates, Ehrhart quasi-polynomials and primitive-point censuses."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, lcm
from typing import Sequence, Union

from .errors import InterpolationMismatch, LevelMismatch
from .geometry import GMap, Point, Polygon, primitivity_level, scaled
from .weights import basis_with_first_column, coprime_shift, divisors, mat_inv, mat_mul, mat_apply

Region = Union[Polygon, Sequence[Polygon]]


def components(R: Region) -> tuple[Polygon, ...]:
    return (R,) if isinstance(R, Polygon) else tuple(R)


def region_denominator(R: Region) -> int:
    return lcm(*(P.denominator for P in components(R)))


def region_area(R: Region) -> Fraction:
    return sum((P.area for P in components(R)), Fraction(0))


def _row_intervals(verts: Sequence[Point], y: int) -> list[tuple[Fraction, Fraction]]:
    """Closed x-intervals of the horizontal line at height ``y`` covered by the closed polygon."""
    n = len(verts)
    crossings = []
    out = []
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if a.y == b.y:
            if a.y == y:
                out.append((min(a.x, b.x), max(a.x, b.x)))
            continue
        lo, hi = (a, b) if a.y < b.y else (b, a)
        if lo.y <= y <= hi.y:
            x = lo.x + (y - lo.y) * (hi.x - lo.x) / (hi.y - lo.y)
            out.append((x, x))
            if y < hi.y:
                crossings.append(x)
    crossings.sort()
    out.extend(zip(crossings[::2], crossings[1::2]))
    return out


def _count_integers(intervals: list[tuple[Fraction, Fraction]]) -> int:
    total = 0
    last = None  # largest integer already counted
    for lo, hi in sorted((ceil(a), floor(b)) for a, b in intervals):
        if hi < lo:
            continue
        if last is not None:
            lo = max(lo, last + 1)
        if hi >= lo:
            total += hi - lo + 1
            last = hi
    return total


def count_lattice_points(P: Region, t: int) -> int:
    """``|tP ∩ Z^2|``, summed over the components of a region."""
    if t < 1:
        raise ValueError("dilation factor must be positive")
    total = 0
    for part in components(P):
        verts = [Point(p.x * t, p.y * t) for p in part.vertices]
        ys = [p.y for p in verts]
        for y in range(ceil(min(ys)), floor(max(ys)) + 1):
            total += _count_integers(_row_intervals(verts, y))
    return total


def count_lattice_points_brute(P: Region, t: int) -> int:
    """Reference count by point location over the bounding box of ``tP``."""
    total = 0
    for part in components(P):
        x0, y0, x1, y1 = part.bounding_box()
        for X in range(floor(x0 * t), ceil(x1 * t) + 1):
            for Y in range(floor(y0 * t), ceil(y1 * t) + 1):
                if part.locate(Point(Fraction(X, t), Fraction(Y, t))).value != "outside":
                    total += 1
    return total


# ---------------------------------------------------------------------------


def _lagrange(samples: Sequence[tuple[int, int]]) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients ``(c0, c1, c2)`` of the quadratic through three samples."""
    coeffs = [Fraction(0)] * 3
    for i, (ti, yi) in enumerate(samples):
        # basis polynomial prod_{j != i} (t - tj) / (ti - tj)
        basis = [Fraction(1)]
        denom = 1
        for j, (tj, _) in enumerate(samples):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= tj * basis[k + 1]
            denom *= ti - tj
        for k in range(3):
            coeffs[k] += yi * basis[k] / denom
    return coeffs[0], coeffs[1], coeffs[2]


@dataclass(frozen=True)
class QuasiPolynomial:
    """Quasi-polynomial with constituents ``p_1, ..., p_d``; ``t`` uses ``p_{t mod d}`` with ``p_d`` at ``t = 0 mod d``.

    Each constituent is stored as its coefficients ``(c0, c1, c2)``.
    """

    period: int
    constituents: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def constituent(self, t: int) -> tuple[Fraction, Fraction, Fraction]:
        return self.constituents[(t - 1) % self.period]

    def __call__(self, t: int) -> Fraction:
        c0, c1, c2 = self.constituent(t)
        return c0 + c1 * t + c2 * t * t

    def agrees_with(self, other: QuasiPolynomial) -> bool:
        L = lcm(self.period, other.period)
        return all(self.constituent(t) == other.constituent(t) for t in range(1, L + 1))

    def minimal_period(self) -> int:
        for p in divisors(self.period):
            if all(self.constituent(t) == self.constituent(t + p) for t in range(1, self.period + 1)):
                return p
        return self.period  # pragma: no cover

    def __str__(self) -> str:
        parts = []
        for j, (c0, c1, c2) in enumerate(self.constituents, start=1):
            parts.append(f"p{j}(t) = {c2}*t^2 + {c1}*t + {c0}")
        return "; ".join(parts)


def _sample_counts(P: Region, ts: Sequence[int], workers: int) -> dict[int, int]:
    if workers <= 1:
        return {t: count_lattice_points(P, t) for t in ts}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(zip(ts, pool.map(count_lattice_points, [P] * len(ts), ts)))


def ehrhart_quasipolynomial(P: Region, workers: int = 1) -> QuasiPolynomial:
    """Fit one quadratic per residue class through ``t = j, j+d, j+2d`` and check it at ``j+3d``."""
    d = region_denominator(P)
    counts = _sample_counts(P, range(1, 4 * d + 1), workers)
    out = []
    for j in range(1, d + 1):
        ts = (j, j + d, j + 2 * d)
        c0, c1, c2 = _lagrange([(t, counts[t]) for t in ts])
        check = j + 3 * d
        if c0 + c1 * check + c2 * check * check != counts[check]:
            raise InterpolationMismatch(f"constituent {j} fails its fourth sample")
        out.append((c0, c1, c2))
    return QuasiPolynomial(d, tuple(out))


def vertex_compatible(P: Region, Q: Region, workers: int = 1) -> bool:
    return ehrhart_quasipolynomial(P, workers).agrees_with(ehrhart_quasipolynomial(Q, workers))


# ---------------------------------------------------------------------------


def primitive_census(P: Region, max_n: int) -> dict[int, int]:
    """``{n: |P ∩ S_n|}`` for ``n <= max_n``, by inclusion over divisors."""
    census: dict[int, int] = {}
    for n in range(1, max_n + 1):
        census[n] = count_lattice_points(P, n) - sum(census[m] for m in divisors(n)[:-1])
    return census


def primitive_count(P: Region, n: int) -> int:
    """``|P ∩ S_n|``: points of ``P`` whose least lattice level is exactly ``n``."""
    memo: dict[int, int] = {}

    def rec(m: int) -> int:
        if m not in memo:
            memo[m] = count_lattice_points(P, m) - sum(rec(k) for k in divisors(m)[:-1])
        return memo[m]

    return rec(n)


def primitive_count_brute(P: Region, n: int) -> int:
    """Reference count that filters the points of ``P ∩ L_n`` by their level."""
    total = 0
    for part in components(P):
        x0, y0, x1, y1 = part.bounding_box()
        for X in range(floor(x0 * n), ceil(x1 * n) + 1):
            for Y in range(floor(y0 * n), ceil(y1 * n) + 1):
                p = Point(Fraction(X, n), Fraction(Y, n))
                if primitivity_level(p) == n and part.locate(p).value != "outside":
                    total += 1
    return total


def _to_visible(p: Point, n: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer shift ``v`` with ``n*(p + v)`` visible, and that visible vector."""
    a, b = scaled(p, n)
    vy = 0
    if b == 0:
        vy, b = 1, n
    q = coprime_shift(a, b, n)
    return (q, vy), (a + q * n, b)


def map_primitive_point(p: Point, q: Point) -> GMap:
    """A G-map sending the n-primitive point ``p`` to the n-primitive point ``q``."""
    n = primitivity_level(p)
    if primitivity_level(q) != n:
        raise LevelMismatch(f"{p} has level {n} but {q} has level {primitivity_level(q)}")
    vp, (ap, bp) = _to_visible(p, n)
    vq, (aq, bq) = _to_visible(q, n)
    U = mat_mul(basis_with_first_column(aq, bq), mat_inv(basis_with_first_column(ap, bp)))
    ux, uy = mat_apply(U, *vp)
    g = GMap(U, (ux - vq[0], uy - vq[1]))
    assert g(p) == q
    return g
