"""Command-line interface: ``enci <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from enci.dataset import DataError, NumericalError
from enci.evaluate import bench_graph, bench_pairs, kmeanspp_groups
from enci.hsic import DEFAULT_ALPHA
from enci.io import load_grouped_csv, read_table, save_grouped_csv
from enci.kernels import KernelConfig
from enci.lingam import DEFAULT_PRUNE, infer_graph
from enci.pairwise import infer_pair
from enci.synth import SynthSpec, generate
from enci.trace import DEFAULT_ESTIMATOR, ESTIMATORS

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bandwidth-multiplier", type=float, action="append", dest="multipliers",
                   metavar="M", help="median-distance multiplier; repeat for a sweep")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--prune-threshold", type=float, default=DEFAULT_PRUNE)
    p.add_argument("--trace-estimator", choices=ESTIMATORS, default=DEFAULT_ESTIMATOR)
    p.add_argument("--output", "-o", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")


def _spec_args(p, topology_choices):
    p.add_argument("--topology", choices=topology_choices, default=topology_choices[0])
    p.add_argument("--mechanism", choices=("additive", "multiplicative"))
    p.add_argument("--groups", type=int, help="number of groups (default depends on topology)")
    p.add_argument("--size-min", type=int, default=40)
    p.add_argument("--size-max", type=int, default=50)
    p.add_argument("--p", type=int, default=10, help="tree size for --topology tsg")
    p.add_argument("--mipg-strategy", choices=("product", "sum"), default="product")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="enci", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic grouped dataset")
    _spec_args(p, ("pair", "tsg", "mipg"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True, help="CSV path; truth goes to <stem>.truth.json")

    p = sub.add_parser("infer-pair", help="orient a cause-effect pair")
    p.add_argument("input", help="grouped CSV or JSON manifest")
    p.add_argument("--x", help="first variable (default: first column)")
    p.add_argument("--y", help="second variable (default: second column)")
    _common(p, seed=False)

    p = sub.add_parser("infer-graph", help="estimate a tree or multiple-parent graph")
    p.add_argument("input", help="grouped CSV or JSON manifest")
    _common(p)

    p = sub.add_parser("bench-pairs", help="pair accuracy on synthetic data")
    _spec_args(p, ("pair",))
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds per run")
    _common(p)

    p = sub.add_parser("bench-graph", help="edge precision/recall on synthetic graphs")
    _spec_args(p, ("tsg", "mipg"))
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds per run")
    _common(p)

    p = sub.add_parser("subsample", help="k-means++ groups from a single table")
    p.add_argument("input", help="CSV with a header row")
    p.add_argument("--clusters", type=int, default=15)
    p.add_argument("--group-size", type=int, default=50)
    p.add_argument("--groups", type=int, default=1500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", required=True)

    p = sub.add_parser("selftest", help="run the built-in oracle and property checks")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _spec(args, topology=None) -> SynthSpec:
    if args.size_min > args.size_max:
        raise UsageError("--size-min exceeds --size-max")
    return SynthSpec(seed=args.seed, topology=topology or args.topology, mechanism=args.mechanism,
                     n_groups=args.groups, group_size_range=(args.size_min, args.size_max),
                     p=args.p, mipg_strategy=args.mipg_strategy)


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else (os.cpu_count() or 1)


def _multipliers(args):
    ms = args.multipliers or [1.0]
    for m in ms:
        if not m > 0:
            raise UsageError(f"bandwidth multiplier must be positive, got {m}")
    return ms


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args):
    data, truth = generate(_spec(args))
    save_grouped_csv(data, args.output)
    out = Path(args.output)
    truth_path = out.with_name(out.stem + ".truth.json")
    edges = [[data.variables[m], data.variables[n]] for n, m in zip(*np.nonzero(truth))]
    truth_path.write_text(json.dumps({"variables": list(data.variables), "edges": edges,
                                      "spec": data.provenance["synth"]}, indent=2) + "\n")
    print(f"wrote {data.n_groups} groups to {out} and truth to {truth_path}", file=sys.stderr)


def _cmd_infer_pair(args):
    data = load_grouped_csv(args.input)
    cols = [args.x or data.variables[0], args.y or (data.variables[1] if data.n_vars > 1 else None)]
    if cols[1] is None:
        raise DataError("dataset has a single variable")
    data = data.select(cols)
    results = []
    for m in _multipliers(args):
        d = infer_pair(data, KernelConfig(multiplier=m), args.alpha, args.trace_estimator)
        results.append({"multiplier": m, "x": cols[0], "y": cols[1], "direction": d.direction,
                        "cause": d.cause, "r_xy": d.r_xy, "r_yx": d.r_yx,
                        "slope_xy": d.slope_xy, "slope_yx": d.slope_yx})
    if args.format == "json":
        _emit(args, json.dumps(results, indent=2) + "\n")
    else:
        lines = ["multiplier\tdirection\tr_xy\tr_yx"]
        lines += [f"{r['multiplier']:g}\t{r['direction']}\t{r['r_xy']:.6g}\t{r['r_yx']:.6g}" for r in results]
        _emit(args, "\n".join(lines) + "\n")


def _cmd_infer_graph(args):
    data = load_grouped_csv(args.input)
    out = []
    for m in _multipliers(args):
        g = infer_graph(data, KernelConfig(multiplier=m), args.seed, args.prune_threshold,
                        _jobs(args), args.trace_estimator)
        out.append({
            "multiplier": m,
            "variables": list(data.variables),
            "verdict": g.shape_verdict,
            "edges": [[data.variables[a], data.variables[b]] for a, b in g.edges()],
            "coefficients": g.coefficients.entries.tolist(),
            "variable_order": [data.variables[i] for i in g.coefficients.variable_order],
        })
    if args.format == "json":
        _emit(args, json.dumps(out, indent=2) + "\n")
        return
    lines = []
    for r in out:
        lines.append(f"# multiplier {r['multiplier']:g}  verdict {r['verdict']}")
        lines += [f"{a} -> {b}" for a, b in r["edges"]] or ["(no edges)"]
    _emit(args, "\n".join(lines) + "\n")


def _cmd_bench(args, graph: bool):
    if graph:
        ms = _multipliers(args)
        if len(ms) > 1:
            raise UsageError("bench-graph takes a single --bandwidth-multiplier")
        report = bench_graph(_spec(args), KernelConfig(multiplier=ms[0]), args.runs,
                             args.prune_threshold, args.trace_estimator, _jobs(args), args.timing)
    else:
        report = bench_pairs(_spec(args, "pair"), _multipliers(args), args.runs, args.alpha,
                             args.trace_estimator, _jobs(args), args.timing)
    _emit(args, report.to_json() if args.format == "json" else report.to_table())


def _cmd_subsample(args):
    names, X = read_table(args.input)
    data = kmeanspp_groups(X, args.clusters, args.group_size, args.groups, args.seed, names)
    save_grouped_csv(data, args.output)
    print(f"wrote {data.n_groups} groups of {args.group_size} rows to {args.output}", file=sys.stderr)


def _cmd_selftest(args):
    from enci.selftest import run_all

    ok = run_all(seed=args.seed)
    return EXIT_OK if ok else EXIT_NUMERIC


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {
        "gen": _cmd_gen,
        "infer-pair": _cmd_infer_pair,
        "infer-graph": _cmd_infer_graph,
        "bench-pairs": lambda a: _cmd_bench(a, graph=False),
        "bench-graph": lambda a: _cmd_bench(a, graph=True),
        "subsample": _cmd_subsample,
        "selftest": _cmd_selftest,
    }
    try:
        code = handlers[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"enci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"enci: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"enci: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"enci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
