"""Command-line front end.

Subcommands
-----------
solve
    Exact h(G) by the chosen method; text, JSON, or one-row CSV output.
bounds
    Per-cardinality lower and upper bisection bounds from the
    pre-elimination pass, or one exactly solved cardinality with ``--k``.
verify
    Check a claimed lower bound on h(G); prints a refuting subset when
    the claim fails.
gen
    Emit a generated graph in edge-list format.
maxcut
    Run the branch-and-bound engine on a raw weighted instance, with an
    optional per-node trace CSV.

Exit codes: 0 success (for ``verify``: bound valid), 1 bound refuted,
2 bad input, 3 budget exhausted.  The ``CHEEGER_LOG`` environment
variable sets the logging level for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

from cheeger.annealing import anneal_bisection
from cheeger.dinkelbach import dinkelbach_solve
from cheeger.graphs import (
    GraphFormatError,
    brute_force_h,
    dump_graph,
    generate,
    load_graph,
    sniff_format,
)
from cheeger.maxcut import solve_maxcut
from cheeger.report import (
    SolveReport,
    bounds_csv,
    report_json,
    summary_csv,
    text_summary,
)
from cheeger.split_bound import (
    LimitExceeded,
    cheap_lower_bound,
    pre_eliminate,
    split_and_bound,
    verify_lower_bound,
)
from cheeger.transforms import TransformError, bisection_to_maxcut, load_instance

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_BAD_INPUT = 2
EXIT_LIMIT = 3


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _add_budget_options(p: argparse.ArgumentParser):
    p.add_argument("--time-limit", type=float, default=3600.0, metavar="S",
                   help="wall-clock budget in seconds (default 3600)")
    p.add_argument("--node-limit", type=int, default=10**6, metavar="N",
                   help="total branch-and-bound node budget (default 1e6)")
    p.add_argument("--workers", type=int, default=1, metavar="W",
                   help="bounding threads in the inner engine (default 1)")
    p.add_argument("--seed", type=int, default=0, metavar="S",
                   help="seed for heuristics and rounding (default 0)")


def _add_output_options(p: argparse.ArgumentParser, default_format: str):
    p.add_argument("--format", choices=("csv", "json", "text"),
                   default=default_format,
                   help=f"output rendering (default {default_format})")
    p.add_argument("--out", metavar="PATH",
                   help="write the report to PATH instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cheeger",
        description="Exact edge expansion h(G) of simple connected graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="compute h(G) exactly")
    solve.add_argument("graph", help="graph file, or - for stdin")
    solve.add_argument("--method", default="split-bound",
                       choices=("split-bound", "dinkelbach", "brute"))
    _add_budget_options(solve)
    _add_output_options(solve, "text")

    bounds = sub.add_parser(
        "bounds", help="per-cardinality bisection bounds from pre-elimination")
    bounds.add_argument("graph", help="graph file, or - for stdin")
    bounds.add_argument("--k", type=int, metavar="K",
                        help="solve the size-K bisection exactly instead")
    _add_budget_options(bounds)
    _add_output_options(bounds, "csv")

    verify = sub.add_parser("verify", help="check a claimed lower bound on h(G)")
    verify.add_argument("graph", help="graph file, or - for stdin")
    verify.add_argument("--lb", type=_rational, required=True, metavar="A/B",
                        help="claimed lower bound, a nonnegative rational")
    _add_budget_options(verify)

    gen = sub.add_parser("gen", help="emit a generated graph in edge-list form")
    gen.add_argument("family",
                     choices=("complete", "cycle", "path", "hypercube", "gnp"))
    gen.add_argument("params", nargs="+",
                     help="family parameters: n, or n and edge probability")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", metavar="PATH")

    maxcut = sub.add_parser(
        "maxcut", help="run the branch-and-bound engine on a weight matrix")
    maxcut.add_argument("instance", help="instance file, or - for stdin")
    maxcut.add_argument("--trace", metavar="PATH",
                        help="write a per-node search trace CSV to PATH")
    _add_budget_options(maxcut)
    return parser


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_graph_file(path: str):
    text = _read_text(path)
    return load_graph(text, fmt=sniff_format(text))


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _render_report(report: SolveReport, fmt: str) -> str:
    if fmt == "json":
        return report_json(report)
    if fmt == "csv":
        return summary_csv(report)
    return text_summary(report)


def _cmd_solve(args) -> int:
    g = _load_graph_file(args.graph)
    if args.method == "split-bound":
        report = split_and_bound(
            g, seed=args.seed, workers=args.workers,
            node_limit=args.node_limit, time_limit=args.time_limit,
        )
    elif args.method == "dinkelbach":
        report = dinkelbach_solve(
            g, seed=args.seed, workers=args.workers,
            node_limit=args.node_limit, time_limit=args.time_limit,
        )
    else:
        try:
            h, witness = brute_force_h(g)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        report = SolveReport(
            method="brute", n=g.n, m=g.m, status="solved",
            lower=h, upper=h, witness=witness.indices(),
            interesting=0, root_solved=0, nodes=0, iterations=0,
            seed=args.seed, workers=1, preelim_ms=0.0, total_ms=0.0,
        )
    _emit(_render_report(report, args.format), args.out)
    return EXIT_OK if report.status == "solved" else EXIT_LIMIT


def _bounds_payload(g, rows) -> str:
    return json.dumps(
        {
            "schema": 1,
            "n": g.n,
            "m": g.m,
            "table": [
                [row.k, row.lower.numerator, row.lower.denominator,
                 row.upper.numerator, row.upper.denominator, row.status]
                for row in rows
            ],
        },
        sort_keys=True, indent=2,
    ) + "\n"


def _bounds_text(rows) -> str:
    lines = [f"{'k':>3} {'lower':>10} {'upper':>10}  status"]
    for row in rows:
        lines.append(
            f"{row.k:>3} {str(row.lower):>10} {str(row.upper):>10}  {row.status}"
        )
    return "\n".join(lines) + "\n"


def _cmd_bounds(args) -> int:
    g = _load_graph_file(args.graph)
    limited = False
    if args.k is None:
        rows = pre_eliminate(g, seed=args.seed).rows()
    else:
        rows, limited = _solve_single_k(g, args)
    if args.format == "json":
        text = _bounds_payload(g, rows)
    elif args.format == "text":
        text = _bounds_text(rows)
    else:
        text = bounds_csv(rows)
    _emit(text, args.out)
    return EXIT_LIMIT if limited else EXIT_OK


def _solve_single_k(g, args):
    """Exactly solve one bisection cardinality; falls back to bounds on limit."""
    from cheeger.report import BoundRow

    k = args.k
    if not 1 <= k <= g.n // 2:
        raise GraphFormatError(f"k must lie in [1, {g.n // 2}], got {k}")
    ub_cut, witness = anneal_bisection(g, k, seed=args.seed, restarts=30)
    red = bisection_to_maxcut(g, k, ub_cut)
    res = solve_maxcut(
        red.instance, node_limit=args.node_limit,
        time_limit=args.time_limit, seed=args.seed, workers=args.workers,
    )
    if res.status == "optimal":
        cut = red.offset - res.value
        subset = red.decode_subset(res.mask)
        row = BoundRow(k, Fraction(cut, k), Fraction(cut, k), "solved",
                       subset.indices())
        return (row,), False
    lower = cheap_lower_bound(g, k)
    row = BoundRow(k, lower, Fraction(ub_cut, k), "pending", witness.indices())
    return (row,), True


def _cmd_verify(args) -> int:
    g = _load_graph_file(args.graph)
    try:
        ok, certificate = verify_lower_bound(
            g, args.lb, seed=args.seed, workers=args.workers,
            node_limit=args.node_limit, time_limit=args.time_limit,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except LimitExceeded as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    if ok:
        print(f"valid: {args.lb} <= h(G)")
        return EXIT_OK
    from cheeger.graphs import cut_value, expansion

    members = " ".join(str(v + 1) for v in certificate.indices())
    ratio = expansion(g, certificate)
    print(f"refuted: S = {{{members}}} has cut {cut_value(g, certificate)} "
          f"and expansion {ratio} < {args.lb}")
    return EXIT_REFUTED


def _cmd_gen(args) -> int:
    try:
        if args.family == "gnp":
            if len(args.params) != 2:
                raise ValueError("gnp takes n and an edge probability")
            g = generate("gnp", int(args.params[0]), float(args.params[1]),
                         args.seed)
            label = f"gnp {args.params[0]} {args.params[1]} seed {args.seed}"
        else:
            if len(args.params) != 1:
                raise ValueError(f"{args.family} takes a single size parameter")
            g = generate(args.family, int(args.params[0]))
            label = f"{args.family} {args.params[0]}"
    except (ValueError, GraphFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    _emit(dump_graph(g, comment=label), args.out)
    return EXIT_OK


def _cmd_maxcut(args) -> int:
    inst = load_instance(_read_text(args.instance))
    trace_rows: list | None = [] if args.trace else None
    res = solve_maxcut(
        inst, node_limit=args.node_limit, time_limit=args.time_limit,
        seed=args.seed, workers=args.workers, trace=trace_rows,
    )
    if args.trace:
        lines = ["node,depth,bound,incumbent"]
        lines.extend(f"{nid},{depth},{bound:.6f},{inc}"
                     for nid, depth, bound, inc in trace_rows)
        _emit("\n".join(lines) + "\n", args.trace)
    if res.mask is None:
        side = "-"
    else:
        members = [str(i + 1) for i in range(inst.n) if res.mask >> i & 1]
        side = "{" + " ".join(members) + "}"
    sys.stdout.write(
        f"value      {res.value}\n"
        f"status     {res.status}\n"
        f"nodes      {res.nodes}\n"
        f"best_bound {res.best_bound:.6f}\n"
        f"side       {side}\n"
    )
    return EXIT_OK if res.status in ("optimal", "bound-stop") else EXIT_LIMIT


def main(argv=None) -> int:
    level = os.environ.get("CHEEGER_LOG")
    if level:
        logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                            stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "solve": _cmd_solve,
        "bounds": _cmd_bounds,
        "verify": _cmd_verify,
        "gen": _cmd_gen,
        "maxcut": _cmd_maxcut,
    }
    try:
        return handlers[args.command](args)
    except (GraphFormatError, TransformError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
