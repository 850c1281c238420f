"""Command-line front end.

Subcommands::

    eval            evaluate a metric on points read from --input
    check           fuzz the axioms of a metric (exhaustive for hypergraphs)
    counterexample  reproduce the tetrahedron or Hausdorff counterexample
    hyper           connectivity and distances of a hypergraph file
    family          the complex equality family for parameters q, s

Exit codes: 0 passed, 1 violation found, 2 usage or parse error,
3 numerical failure, 4 an expected violation was not found.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from typing import Any

from . import catalog, hypergraph, sets, vandermonde
from .axioms import DEFAULT_TOL, exhaustive_check, fuzz_metric, to_jsonable
from .errors import ConstructionBug, NumericalFailure, UsageError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_MISSING_VIOLATION = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(path: str | None) -> Any:
    if path is None:
        raise UsageError("--input is required")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, str):
        return v
    return str(v)


def _text_lines(obj, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        out = []
        for key, val in obj.items():
            out += _text_lines(val, f"{prefix}.{key}" if prefix else str(key))
        return out
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        out = []
        for i, val in enumerate(obj):
            out += _text_lines(val, f"{prefix}[{i}]")
        return out or [f"{prefix}: []"]
    if isinstance(obj, list):
        return [f"{prefix}: " + " ".join(_fmt(v) for v in obj)]
    return [f"{prefix}: {_fmt(obj)}"]


def render(report: dict, fmt: str) -> str:
    report = to_jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2)
    return "\n".join(_text_lines(report))


def _emit(args, report: dict) -> None:
    text = render(report, args.format) + "\n"
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {args.output}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _sizes(args, n: int | None = None) -> catalog.Sizes:
    return catalog.Sizes(
        n=args.n if n is None else n, dim=args.dim, k=args.k, m=args.m, p=args.p, seed=args.seed
    )


def _tuple_arg(raw: str | None) -> list[str]:
    if not raw:
        raise UsageError("--tuple is required, e.g. --tuple 1,2,3")
    return [t.strip() for t in raw.split(",")]


def _hypergraph(args) -> hypergraph.Hypergraph:
    return hypergraph.Hypergraph.from_dict(_load(args.input), force=args.force)


# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    if args.metric == "hyper":
        H = _hypergraph(args)
        tup = _tuple_arg(args.tuple)
        _emit(args, {"metric": "hyper", "tuple": tup, "value": hypergraph.d_hyper(H, tup)})
        return EXIT_OK
    if args.metric not in catalog.METRICS:
        raise UsageError(f"unknown metric {args.metric!r}")
    spec = catalog.METRICS[args.metric]
    doc = _load(args.input)
    points = catalog.parse_points(doc, "frame" if spec.kind == "frame" else spec.kind)
    if args.metric == "gen-vandermonde" and isinstance(doc, dict) and "tensor" in doc:
        A = vandermonde.SymmetricTensorMap.from_dict(doc["tensor"])
        metric = vandermonde.generalized_metric(A, args.p)
    else:
        sizes = _sizes(args, n=len(points))
        if spec.kind in ("vector", "unit", "function"):
            sizes = catalog.Sizes(len(points), len(points[0]), args.k, args.m, args.p, args.seed)
        elif spec.kind == "frame":
            sizes = catalog.Sizes(len(points), args.dim, points[0].shape[1], points[0].shape[0], args.p, args.seed)
        _, metric, _ = catalog.build(args.metric, sizes)
    value = metric(points)
    _emit(args, {"metric": metric.label, "n": len(points), "value": value})
    return EXIT_OK


def cmd_check(args) -> int:
    tol = args.tol
    if args.metric == "hyper":
        H = _hypergraph(args)
        tol = 0.0 if tol is None else tol
        report = exhaustive_check(hypergraph.hyper_metric(H), H.labels, tol=tol, all_permutations=False)
        out = report.to_dict()
        out.update({"mode": "exhaustive", "experimental": False})
        _emit(args, out)
        return EXIT_OK if report.ok else EXIT_VIOLATION
    spec, metric, sampler = catalog.build(args.metric, _sizes(args))
    tol = spec.tol if tol is None else tol
    report = fuzz_metric(metric, sampler, args.trials, args.seed, tol)
    out = report.to_dict()
    out["violations"] = out["violations"][: args.max_witnesses]
    out.update({
        "mode": "fuzz",
        "violation_count": len(report.violations),
        "sampler": sampler.description,
        "experimental": spec.experimental,
        "note": spec.note,
    })
    _emit(args, out)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_counterexample(args) -> int:
    if args.which == "tetrahedron":
        pts = vandermonde.tetrahedron()
        metric = vandermonde.norm_product_metric(4)
        y = [0.0, 0.0, 0.0]
        lhs = metric(pts)
        rhs = sum(metric(pts[:i] + [y] + pts[i + 1:]) for i in range(4))
        margin = rhs - lhs
        report = {
            "which": "tetrahedron",
            "points": pts,
            "y": y,
            "lhs": lhs,
            "rhs": rhs,
            "lhs_closed_form": (8.0 / 3.0) ** 3,
            "rhs_closed_form": 4.0 * (8.0 / 3.0) ** 1.5,
            "margin": margin,
            "violated": margin < -DEFAULT_TOL * max(1.0, lhs, rhs),
        }
        _emit(args, report)
        return EXIT_VIOLATION if report["violated"] else EXIT_MISSING_VIOLATION
    if args.N is None:
        raise UsageError("hausdorff needs --N")
    try:
        rep = sets.verify_counterexample(args.N)
    except ConstructionBug as exc:
        _emit(args, {"which": "hausdorff", "N": args.N, "error": str(exc), "violated": False})
        return EXIT_MISSING_VIOLATION
    out = rep.to_dict()
    out["which"] = "hausdorff"
    out["summary"] = f"3-metric verified; d_H violation margin {rep.margin:g}"
    out["violated"] = rep.margin < 0
    _emit(args, out)
    return EXIT_VIOLATION if rep.margin < 0 else EXIT_MISSING_VIOLATION


def cmd_hyper(args) -> int:
    H = _hypergraph(args)
    connected = hypergraph.is_connected(H)
    out: dict = {
        "n": H.n,
        "vertices": len(H.labels),
        "edges": len(H.edges),
        "connected": connected,
    }
    if not connected:
        _emit(args, out)
        return EXIT_OK
    if args.tuple:
        tup = _tuple_arg(args.tuple)
        out["tuple"] = tup
        out["value"] = hypergraph.d_hyper(H, tup)
        if args.y is not None:
            out["y"] = args.y
            out["sharper_margin"] = hypergraph.sharper_inequality_margin(H, tup, args.y)
    else:
        out["distances"] = [
            {"tuple": list(c), "value": hypergraph.d_hyper(H, list(c))}
            for c in itertools.combinations(H.labels, H.n)
        ]
    _emit(args, out)
    return EXIT_OK


def cmd_family(args) -> int:
    if args.q is None or args.s is None:
        raise UsageError("family needs --q and --s")
    p = vandermonde.EqualityFamilyParams(args.q, args.s)
    quad = vandermonde.equality_family(p)
    _emit(args, {
        "q": p.q,
        "s": p.s,
        "y": quad[0],
        "z": list(quad[1:]),
        "residual": vandermonde.equality_residual(*quad),
    })
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "check": cmd_check,
    "counterexample": cmd_counterexample,
    "hyper": cmd_hyper,
    "family": cmd_family,
}


def _seed(raw: str) -> int:
    v = int(raw, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_float(raw: str) -> float:
    v = float(raw)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("expected a finite number")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--metric", default=None)
    common.add_argument("--n", type=int, default=3)
    common.add_argument("--dim", type=int, default=3)
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--m", type=int, default=4)
    common.add_argument("--p", type=float, default=2.0, help="norm exponent for lift / lp-discrete / gen-vandermonde")
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--input", default=None)
    common.add_argument("--output", default=None)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--force", action="store_true", help="lift capacity guards")
    common.add_argument("--tuple", default=None, help="comma-separated vertex labels")
    common.add_argument("--y", default=None, help="substitute vertex for the sharper inequality")
    common.add_argument("--N", type=int, default=None)
    common.add_argument("--q", type=_positive_float, default=None)
    common.add_argument("--s", type=_positive_float, default=None)
    common.add_argument("--max-witnesses", type=int, default=5)

    parser = _Parser(prog="nmetric", description="Pseudo n-metric toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eval", parents=[common], help="evaluate a metric on points from --input")
    sub.add_parser("check", parents=[common], help="fuzz the pseudo n-metric axioms")
    ce = sub.add_parser("counterexample", parents=[common], help="reproduce a known counterexample")
    ce.add_argument("which", choices=("tetrahedron", "hausdorff"))
    sub.add_parser("hyper", parents=[common], help="inspect a hypergraph file")
    sub.add_parser("family", parents=[common], help="complex equality family")
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command in ("eval", "check") and not args.metric:
            raise UsageError("--metric is required")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"nmetric: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"nmetric: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ArithmeticError as exc:
        print(f"nmetric: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
