"""JSON documents for polygons, regions, relations and results.

Coordinates are always exact fraction strings in lowest terms ("-3/4",
"2"); floats are rejected on input.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .ehrhart import QuasiPolynomial, Region, components
from .geometry import Point, Polygon
from .relation import KINDS, Piece, Relation, Report
from .triangulation import Triangulation
from .weights import PolygonWeight, triangle_weight


class DocumentError(ValueError):
    """A JSON document does not have the expected shape."""


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_fraction(value: Any) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise DocumentError(f"coordinates must be integers or fraction strings, not {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(f"bad fraction {value!r}") from exc
    raise DocumentError(f"bad coordinate {value!r}")


def point_doc(p: Point) -> list[str]:
    return [frac_str(p.x), frac_str(p.y)]


def parse_point(doc: Any) -> Point:
    if not isinstance(doc, (list, tuple)) or len(doc) != 2:
        raise DocumentError(f"a point is a pair of coordinates, got {doc!r}")
    return Point(parse_fraction(doc[0]), parse_fraction(doc[1]))


def polygon_doc(P: Polygon, name: str | None = None) -> dict:
    out: dict = {}
    if name is not None:
        out["name"] = name
    out["vertices"] = [point_doc(p) for p in P.vertices]
    return out


def region_doc(R: Region, name: str | None = None) -> dict:
    if isinstance(R, Polygon):
        return polygon_doc(R, name)
    out: dict = {}
    if name is not None:
        out["name"] = name
    out["components"] = [polygon_doc(P) for P in components(R)]
    return out


def parse_polygon(doc: Any) -> Polygon:
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise DocumentError("a polygon document needs a 'vertices' list")
    if not isinstance(doc["vertices"], list):
        raise DocumentError("'vertices' must be a list")
    return Polygon(tuple(parse_point(v) for v in doc["vertices"]))


def parse_region(doc: Any) -> Region:
    if isinstance(doc, dict) and "components" in doc:
        if not isinstance(doc["components"], list):
            raise DocumentError("'components' must be a list")
        parts = tuple(parse_polygon(c) for c in doc["components"])
        if not parts:
            raise DocumentError("a region needs at least one component")
        return parts[0] if len(parts) == 1 else parts
    return parse_polygon(doc)


def relation_doc(rel: Relation) -> dict:
    return {
        "pieces": [
            {
                "kind": p.kind,
                "vertices": [point_doc(v) for v in p.vertices],
                "matrix": [list(row) for row in p.matrix],
                "translation": list(p.translation),
            }
            for p in rel.pieces
        ]
    }


def _int(v: Any) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise DocumentError(f"expected an integer, got {v!r}")
    return v


def parse_relation(doc: Any) -> Relation:
    if not isinstance(doc, dict) or not isinstance(doc.get("pieces"), list):
        raise DocumentError("a relation document needs a 'pieces' list")
    pieces = []
    for item in doc["pieces"]:
        if not isinstance(item, dict):
            raise DocumentError(f"a piece is an object, got {item!r}")
        kind = item.get("kind")
        if kind not in KINDS:
            raise DocumentError(f"unknown cell kind {kind!r}")
        try:
            (a, b), (c, d) = ((_int(x) for x in row) for row in item["matrix"])
            tx, ty = (_int(x) for x in item["translation"])
            verts = tuple(parse_point(v) for v in item["vertices"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DocumentError):
                raise
            raise DocumentError(f"malformed piece {item!r}") from exc
        pieces.append(Piece(kind, verts, ((a, b), (c, d)), (tx, ty)))
    return Relation(pieces)


def quasipolynomial_doc(qp: QuasiPolynomial) -> dict:
    return {
        "period": qp.period,
        "minimal_period": qp.minimal_period(),
        "constituents": [
            {"residue": j % qp.period, "coefficients": [frac_str(c) for c in coeffs]}
            for j, coeffs in enumerate(qp.constituents, start=1)
        ],
    }


def weight_doc(pw: PolygonWeight) -> dict:
    return {
        "modulus": pw.modulus,
        "total": pw.total,
        "classes": [
            {"residue": c.residue, "level": c.canonical.level, "offset": c.canonical.offset, "count": m}
            for c, m in pw.classes
        ],
    }


def triangulation_doc(T: Triangulation) -> dict:
    return {
        "level": T.level,
        "vertices": len(T.vertices),
        "edges": len(T.edges),
        "facets": [
            {"vertices": [point_doc(v) for v in f.vertices], "weight": list(triangle_weight(f, T.level).residues)}
            for f in T.facets
        ],
    }


def report_doc(report: Report) -> dict:
    return {"ok": report.ok, "failures": [{"kind": f.kind, "detail": f.detail} for f in report.failures]}


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))
