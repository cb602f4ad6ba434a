"""Command-line front end: ``diamondlab <command> [flags]``.

Exit codes: 0 success, 1 invariant or inequality violation, 2 invalid
arguments, 3 capacity exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__
from .diamond import build_diamond
from .errors import CapacityError
from .experiments import (
    InvariantViolation,
    bound_table,
    dim_sweep,
    fuzz_inequalities,
    l1_exact,
    tightness,
)
from .metric import shortest_path_metric

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


def _fmt(x) -> str:
    return f"{x:.17g}" if isinstance(x, float) else str(x)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _record(command: str, params: dict, result: dict) -> str:
    rec = {"command": command, "params": params, **result,
           "version": __version__,
           "timestamp": datetime.now(timezone.utc).isoformat()}
    return json.dumps(rec, indent=2) + "\n"


def write_output(text: str, path: str | None) -> None:
    """Write to stdout, or atomically to ``path`` via a temp file and rename."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- commands

def cmd_generate(args) -> int:
    g = build_diamond(args.k)
    write_output(json.dumps(g.to_json()) + "\n", args.out)
    return EXIT_OK


def cmd_metric(args) -> int:
    m = shortest_path_metric(build_diamond(args.k))
    write_output(m.to_csv(), args.out)
    return EXIT_OK


def cmd_bound_table(args) -> int:
    rows = bound_table(args.k, args.p or [])
    write_output(_csv(["k", "p", "lower_bound"], rows), args.out)
    return EXIT_OK


def cmd_tightness(args) -> int:
    p = _single(args.p, "p", 2.0)
    d = _single(args.d, "d", 2)
    res = tightness(args.k, p, d, args.seed, args.restarts)
    f = res.pop("embedding")
    if args.embedding_out:
        write_output(f.to_csv(), args.embedding_out)
    params = {"k": args.k, "p": p, "d": d, "seed": args.seed, "restarts": args.restarts}
    write_output(_record("tightness", params, res), args.out)
    return EXIT_OK


def cmd_dim_sweep(args) -> int:
    d_list = args.d or [1, 2, 3, 5, 8]
    res = dim_sweep(args.k, d_list, args.seed, args.restarts)
    for note in res.notes:
        print(note, file=sys.stderr)
    header = ["k", "d", "p", "best_distortion", "lower_bound_chain", "seed"]
    write_output(_csv(header, ([r[h] for h in header] for r in res.rows)), args.out)
    return EXIT_OK


def cmd_l1_exact(args) -> int:
    res = l1_exact(args.k)
    write_output(_record("l1-exact", {"k": args.k}, res), args.out)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    summary = fuzz_inequalities(args.trials, args.seed, p_list=args.p, poincare_p=args.p)
    params = {"trials": args.trials, "seed": args.seed, "p": args.p}
    bad = summary.violations()
    write_output(_record("fuzz", params, summary.to_json()), args.out)
    if bad:
        with open(args.replay, "w") as fh:
            json.dump(bad, fh, indent=2)
        print(f"inequality violated; instance written to {args.replay}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _single(values, name: str, default):
    if not values:
        return default
    if len(values) > 1:
        raise ValueError(f"--{name} takes a single value for this command")
    return values[0]


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="diamondlab",
        description="Diamond graph embeddings: certificates, optimizer, exact l1.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_, *, k_default=None, k_help="diamond level k"):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--k", type=int, default=k_default, required=k_default is None, help=k_help)
        p.set_defaults(func=func)
        return p

    add("generate", cmd_generate, "emit G_k as JSON")
    add("metric", cmd_metric, "emit the shortest-path metric of G_k as CSV")

    p = add("bound-table", cmd_bound_table, "certified lower bounds as CSV",
            k_help="largest level in the table")
    p.add_argument("--p", type=float, action="append", help="exponent in [1, 2], repeatable")

    p = add("tightness", cmd_tightness, "bracket the optimal distortion of G_k in l_p^d")
    p.add_argument("--p", type=float, action="append")
    p.add_argument("--d", type=int, action="append")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--embedding-out", help="also write the best embedding as CSV")

    p = add("dim-sweep", cmd_dim_sweep, "best l_1^d distortion against the dimension chain bound")
    p.add_argument("--d", type=int, action="append", help="target dimension, repeatable")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)

    add("l1-exact", cmd_l1_exact, "exact minimum l_1 distortion by the cut LP")

    p = sub.add_parser("fuzz", parents=[common], help="random search for inequality violations")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, action="append", help="override the exponent grid")
    p.add_argument("--replay", default="fuzz-replay.json",
                   help="where to write violating instances")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        if exc.instance is not None:
            print(json.dumps(exc.instance), file=sys.stderr)
        return EXIT_VIOLATION
    except (ValueError, TypeError) as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
