"""Command-line front end.

Exit status: 0 success or yes, 1 no (or a failed verification),
2 inconclusive, 3 usage, parse or input errors.  Machine-readable JSON goes
to stdout, one-line human summaries to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from typing import Optional, Sequence

from .dynamics import DEFAULT_MAX_STATES, dynamics_reachable, initial_pseudo_triangulation, weight_class_graph
from .ehrhart import components, ehrhart_quasipolynomial, primitive_census, region_denominator
from .equidecompose import DEFAULT_MAX_MULTIPLE, decide_equidecomposable
from .errors import EquidecompError
from .io import (
    DocumentError,
    dumps,
    load_json,
    parse_region,
    parse_relation,
    quasipolynomial_doc,
    region_doc,
    relation_doc,
    report_doc,
    triangulation_doc,
    weight_doc,
    write_json,
)
from .relation import verify_relation
from .synthesize import synthesize_equidecomposable_pair
from .triangulation import minimal_triangulation
from .weights import polygon_weight

EXIT_OK, EXIT_NO, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_DYNAMICS_LIMIT = 100_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default, which means inconclusive here
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _region(path: str):
    return parse_region(load_json(path))


def _emit(doc) -> None:
    sys.stdout.write(dumps(doc))


def _say(text: str) -> None:
    print(text, file=sys.stderr)


def cmd_ehrhart(args) -> int:
    qp = ehrhart_quasipolynomial(_region(args.polygon), args.threads)
    _emit(quasipolynomial_doc(qp))
    _say(f"ehrhart: period {qp.period}, minimal period {qp.minimal_period()}")
    return EXIT_OK


def cmd_census(args) -> int:
    census = primitive_census(_region(args.polygon), args.max_n)
    _emit({"census": [{"n": n, "count": c} for n, c in census.items()]})
    _say(f"census: {sum(census.values())} primitive points up to level {args.max_n}")
    return EXIT_OK


def cmd_weight(args) -> int:
    pw = polygon_weight(_region(args.polygon), args.d)
    _emit(weight_doc(pw))
    _say(f"weight: {pw.total} boundary edges in {len(pw.classes)} classes at d={args.d}")
    return EXIT_OK


def cmd_triangulate(args) -> int:
    T = minimal_triangulation(_region(args.polygon), args.d)
    _emit(triangulation_doc(T))
    _say(f"triangulate: {len(T.facets)} facets at d={args.d}")
    return EXIT_OK


def cmd_dynamics(args) -> int:
    seed = initial_pseudo_triangulation(_region(args.polygon), args.d)
    res = dynamics_reachable(seed, max_states=args.limit)
    seen = Counter()
    for pt in res.reachable:
        seen.update(set(pt.triples))
    _emit(
        {
            "modulus": args.d,
            "facets": len(seed),
            "seed": [{"weight": str(w), "count": m} for w, m in sorted(seed.counts.items())],
            "reachable": len(res.reachable),
            "truncated": res.truncated,
            "classes_seen": [str(w) for w in sorted(seen)],
        }
    )
    more = " (truncated)" if res.truncated else ""
    _say(f"dynamics: {len(res.reachable)} reachable pseudo-triangulations{more}")
    return EXIT_OK


def cmd_graph(args) -> int:
    G = weight_class_graph(args.d)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(G.to_dot())
    _emit(
        {
            "modulus": args.d,
            "vertices": [str(w) for w in G.vertices],
            "edges": [[str(a), str(b)] for a, b in sorted(G.edges)],
            "loops": [str(w) for w in G.loops()],
            "max_degree": G.max_degree(),
        }
    )
    _say(f"graph: {len(G.vertices)} weight classes, {len(G.edges)} edges, max degree {G.max_degree()}")
    return EXIT_OK


def cmd_decide(args) -> int:
    P, Q = _region(args.first), _region(args.second)
    v = decide_equidecomposable(P, Q, max_multiple=args.max_multiple, max_states=args.limit, workers=args.threads)
    doc = v.to_json()
    if v.relation is not None:
        doc["relation"] = relation_doc(v.relation)
        if args.relation_out:
            write_json(args.relation_out, relation_doc(v.relation))
    _emit(doc)
    if v.outcome == "yes":
        _say(f"decide: yes at d'={v.level} with {len(v.relation)} pieces")
        return EXIT_OK
    if v.outcome == "no":
        _say(f"decide: no ({v.criterion} compatibility fails)")
        return EXIT_NO
    _say(f"decide: inconclusive up to d'={v.level}")
    return EXIT_INCONCLUSIVE


def cmd_verify(args) -> int:
    P, Q = _region(args.first), _region(args.second)
    rel = parse_relation(load_json(args.relation))
    report = verify_relation(P, Q, rel)
    _emit(report_doc(report))
    if report.ok:
        _say(f"verify: ok ({len(rel)} pieces)")
        return EXIT_OK
    _say(f"verify: failed ({', '.join(sorted(report.kinds()))})")
    return EXIT_NO


def cmd_synthesize(args) -> int:
    P = _region(args.polygon)
    if args.d % region_denominator(P):
        raise UsageError(f"--d must be a multiple of the denominator {region_denominator(P)}")
    s = synthesize_equidecomposable_pair(P, args.d, args.seed, moves=args.moves)
    doc = {
        "level": s.level,
        "moves": s.moves,
        "source": region_doc(s.source),
        "target": region_doc(s.target),
        "relation": relation_doc(s.relation),
    }
    if args.target_out:
        write_json(args.target_out, doc["target"])
    if args.relation_out:
        write_json(args.relation_out, doc["relation"])
    _emit(doc)
    count = len(components(s.target))
    _say(f"synthesize: {s.moves} moves, target with {count} component(s), {len(s.relation)} pieces")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="equidecomp", description="Exact tools for rational polygon equidecomposability.")
    p.add_argument("--threads", type=_positive, default=1, help="worker processes for lattice point sampling")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ehrhart", help="Ehrhart quasi-polynomial")
    s.add_argument("polygon")
    s.set_defaults(func=cmd_ehrhart)

    s = sub.add_parser("census", help="counts of n-primitive points")
    s.add_argument("polygon")
    s.add_argument("--max-n", type=_positive, required=True)
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("weight", help="boundary Weight at level d")
    s.add_argument("polygon")
    s.add_argument("--d", type=_positive, required=True)
    s.set_defaults(func=cmd_weight)

    s = sub.add_parser("triangulate", help="minimal triangulation at level d")
    s.add_argument("polygon")
    s.add_argument("--d", type=_positive, required=True)
    s.set_defaults(func=cmd_triangulate)

    s = sub.add_parser("dynamics", help="pseudo-flip reachable set from a minimal triangulation")
    s.add_argument("polygon")
    s.add_argument("--d", type=_positive, required=True)
    s.add_argument("--limit", type=_positive, default=DEFAULT_DYNAMICS_LIMIT)
    s.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("graph", help="weight class graph")
    s.add_argument("--d", type=_positive, required=True)
    s.add_argument("--dot", help="write the graph in DOT format to this file")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("decide", help="decide equidecomposability of two polygons")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--max-multiple", type=_positive, default=DEFAULT_MAX_MULTIPLE)
    s.add_argument("--limit", type=_positive, default=DEFAULT_MAX_STATES)
    s.add_argument("--relation-out", help="write the relation document here on a yes")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("verify", help="check a relation document")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("relation")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("synthesize", help="random equidecomposable partner with its relation")
    s.add_argument("polygon")
    s.add_argument("--d", type=_positive, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--moves", type=int, default=3)
    s.add_argument("--target-out")
    s.add_argument("--relation-out")
    s.set_defaults(func=cmd_synthesize)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _say(str(exc))
        return EXIT_USAGE
    except (DocumentError, EquidecompError, OSError, json.JSONDecodeError) as exc:
        _say(f"equidecomp: {type(exc).__name__}: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
