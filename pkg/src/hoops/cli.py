"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 budget or precondition rejection.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .gauge import Connection, get_group, random_connection, transport
from .geom import PolyLoop, decompose
from .pathology import cn_distance, counterexample_family, flatten_loop
from .synth import SynthesisError, falsify_hoop_triviality
from .words import CayleyTable, EnumerationBudgetExceeded, Finite, Word, exponent_vector, is_identity, reduce

HEADER = "# hoops report v1"


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load(kind, path: str):
    text = _read(path)
    try:
        return kind.loads(text)
    except (ValueError, KeyError, TypeError, json.JSONDecodeError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _fmt(x: float) -> str:
    return f"{x:.6e}"


def _matrix_lines(m: np.ndarray) -> list[str]:
    rows = []
    for row in m:
        if np.iscomplexobj(m):
            rows.append("  " + " ".join(f"{z.real:+.12f}{z.imag:+.12f}j" for z in row))
        else:
            rows.append("  " + " ".join(f"{z:+.12f}" for z in row))
    return rows


def cmd_reduce(args) -> list[str]:
    w = _load(Word, args.word_file)
    return [json.dumps(reduce(w).to_list())]


def cmd_decompose(args) -> list[str]:
    loop = _load(PolyLoop, args.loop_file)
    dec = decompose(loop, tree=args.tree)
    lines = [HEADER, "command: decompose", f"generators: {len(dec.generators)}", f"word: {json.dumps(dec.word.to_list())}"]
    for n, g in enumerate(dec.generators, start=1):
        a, b = g.marked
        lines.append(
            f"e{n}: edge {g.edge} tail {g.tail} head {g.head} clearance {g.clearance} "
            f"marked [{', '.join(map(str, a))}] -> [{', '.join(map(str, b))}]"
        )
    if args.export:
        Path(args.export).write_text(dec.dumps())
    return lines


def cmd_hoop_trivial(args) -> list[str]:
    loop = _load(PolyLoop, args.loop_file)
    lines = [HEADER, "command: hoop-trivial"]
    group = args.group
    if group.lower() in ("u1", "so3", "su2", "sl2r"):
        spec = get_group(group)
        res = falsify_hoop_triviality(loop, spec, seed=args.seed, steps=args.steps)
        lines += [f"group: {spec.name}", f"word: {json.dumps(res.decomposition.word.to_list())}"]
        if res.trivial:
            lines.append("verdict: TRIVIAL")
        else:
            lines += [
                "verdict: NONTRIVIAL",
                f"holonomy distance from identity: {_fmt(res.holonomy.distance_to_identity())}",
                f"holonomy error estimate: {_fmt(res.holonomy.error)}",
                "holonomy:",
                *_matrix_lines(res.holonomy.matrix),
            ]
            if args.witness:
                Path(args.witness).write_text(res.connection.dumps())
                Path(args.witness).with_suffix(".provenance.json").write_text(
                    json.dumps(res.synthesis.provenance_record(), indent=1)
                )
                lines.append(f"witness: {args.witness}")
        return lines
    table = _load(CayleyTable, group)
    dec = decompose(loop)
    ok = is_identity(dec.word, Finite(table, budget=args.budget))
    lines += [f"group: table order {table.order}", f"word: {json.dumps(dec.word.to_list())}", f"verdict: {'TRIVIAL' if ok else 'NONTRIVIAL'}"]
    return lines


def cmd_holonomy(args) -> list[str]:
    loop = _load(PolyLoop, args.loop_file)
    conn = _load(Connection, args.connection_file)
    if conn.dim != loop.dim:
        raise InputError("loop and connection dimensions differ")
    h = transport(conn, loop, steps=args.steps)
    return [
        HEADER,
        "command: holonomy",
        f"group: {conn.spec.name}",
        f"steps: {args.steps}",
        f"residual: {_fmt(h.residual)}",
        f"error estimate: {_fmt(h.error)}",
        f"distance from identity: {_fmt(h.distance_to_identity())}",
        "matrix:",
        *_matrix_lines(h.matrix),
    ]


def cmd_counterexample(args) -> list[str]:
    if not 1 <= args.levels <= 24:
        raise InputError("--levels must lie in [1, 24]")
    spec = get_group(args.group)
    ce = counterexample_family(args.levels)
    worst = 0.0
    for k in range(args.trials):
        A = random_connection(spec, ((0.0, -0.2), (1.0, 0.2)), 8, seed=args.seed + k, radius_range=(0.05, 0.5))
        worst = max(worst, transport(A, ce.loop, estimate_error=False).distance_to_identity())
    dec = decompose(flatten_loop(ce.loop, args.resolution))
    f1 = ce.curves[0]
    dists = [(lv, cn_distance(f1.truncated(lv), f1, args.order).value) for lv in range(0, args.levels)]
    lines = [
        HEADER,
        "command: counterexample",
        f"levels: {args.levels}",
        f"group: {spec.name}",
        f"trials: {args.trials}",
        f"seed: {args.seed}",
        f"max |H(c) - 1|: {_fmt(worst)}",
        f"word: {json.dumps(dec.word.to_list())}",
        f"reduced word length: {len(dec.word)}",
        f"exponent vector: {json.dumps(exponent_vector(dec.word))}",
        f"C^{args.order} distance f1[level<=l] to f1[level<={args.levels}]:",
    ]
    lines += [f"  l={lv}: {_fmt(d)}" for lv, d in dists]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["truncation_level", f"cn_distance_N{args.order}"])
            for lv, d in dists:
                w.writerow([lv, repr(d)])
    return lines


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hoops", description="Loops, hoops and holonomies.")
    p.add_argument("--version", action="version", version=f"hoops {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("reduce", help="free-group reduce a word file ([2,3,-1] style)")
    s.add_argument("word_file")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("decompose", help="decompose a loop into independent generator loops")
    s.add_argument("loop_file")
    s.add_argument("--tree", default="bfs", choices=["bfs", "dfs", "random"])
    s.add_argument("--export", help="write the decomposition as JSON")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("hoop-trivial", help="decide hoop triviality for a structure group")
    s.add_argument("loop_file")
    s.add_argument("--group", required=True, help="u1, so3, su2, sl2r, or a Cayley table file")
    s.add_argument("--witness", help="write the witnessing connection here")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--steps", type=int, default=64)
    s.add_argument("--budget", type=int, default=10**7)
    s.set_defaults(func=cmd_hoop_trivial)

    s = sub.add_parser("holonomy", help="holonomy of a connection file around a loop file")
    s.add_argument("loop_file")
    s.add_argument("connection_file")
    s.add_argument("--steps", type=int, default=64)
    s.set_defaults(func=cmd_holonomy)

    s = sub.add_parser("counterexample", help="run the differentiable-case counterexample")
    s.add_argument("--levels", type=int, default=4)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--group", default="u1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--resolution", type=int, default=4)
    s.add_argument("--order", type=int, default=4)
    s.add_argument("--csv", help="write C^N distances as CSV")
    s.set_defaults(func=cmd_counterexample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lines = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EnumerationBudgetExceeded, SynthesisError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
