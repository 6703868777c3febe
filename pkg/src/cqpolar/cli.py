"""Command-line harness: polarization sweeps, code construction, decoding
simulation, bound/exact comparison, and the verification suite.

Channels are given as ``preset:param`` (bsc, bec, pure_overlap, bpsk) or as a
path to a JSON channel spec. All outputs carry a schema tag; runs with the
same configuration and seed produce byte-identical files. The environment
variable ``CQPOLAR_BUDGET`` overrides the dimension/branch caps.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import bounds as bounds_mod
from . import verify as verify_mod
from .budget import Budget, BudgetExceeded
from .channel import (PRESET_NAMES, BinaryCQChannel, load_channel,
                      root_channel_fidelity)
from .construction import construct_code
from .decoder import decode_monte_carlo, exact_block_error, write_trajectory_csv
from .synthesis import split_params

POLARIZE_CSV_SCHEMA = "cqpolar.polarize/1"
POLARIZE_SUMMARY_SCHEMA = "cqpolar.polarize-summary/1"
RELIABILITY_CSV_SCHEMA = "cqpolar.reliabilities/1"
COMPARE_CSV_SCHEMA = "cqpolar.bounds-vs-exact/1"
SUMMARY_DELTAS = (0.1, 0.01)


def parse_channel(arg: str) -> BinaryCQChannel:
    if ":" in arg:
        name, _, raw = arg.partition(":")
        if name in PRESET_NAMES:
            return getattr(BinaryCQChannel, name)(float(raw))
    if os.path.exists(arg):
        return load_channel(arg)
    raise argparse.ArgumentTypeError(
        f"channel {arg!r} is neither 'preset:param' ({', '.join(PRESET_NAMES)}) "
        "nor an existing JSON file")


def _resolve_info_count(args, block_length: int) -> int:
    if args.K is not None:
        if not 0 <= args.K <= block_length:
            raise SystemExit(f"K={args.K} outside 0..{block_length}")
        return args.K
    if not 0.0 <= args.rate <= 1.0:
        raise SystemExit(f"rate {args.rate} outside [0, 1]")
    return int(math.floor(block_length * args.rate))


def _default_figure_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".png"


def _write_rows(out, schema: str, header, rows) -> None:
    def emit(fh):
        fh.write(f"# schema={schema}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)

    if out is None:
        emit(sys.stdout)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            emit(fh)


def cmd_polarize(args) -> int:
    channel = parse_channel(args.channel)
    budget = Budget.from_env()
    block = 1 << args.n
    if args.backend == "exact":
        params = split_params(channel, args.n, budget)
        f_hi = np.array([p.root_fidelity for p in params])
        f_lo = None
        holevo_lo = np.array([p.holevo for p in params])
        holevo_hi = None
        rows = [(i + 1, f"{f_hi[i]:.12g}", f"{holevo_lo[i]:.12g}") for i in range(block)]
        _write_rows(args.out, POLARIZE_CSV_SCHEMA, ["index", "root_fidelity", "holevo"], rows)
    else:
        if args.backend == "bounds":
            table = bounds_mod.propagate_all(root_channel_fidelity(channel), args.n)
        else:
            table = bounds_mod.hybrid_bounds(channel, args.n, budget=budget)
        f_lo, f_hi = table.f_lo, table.f_hi
        holevo_lo, holevo_hi = table.holevo_lo(), table.holevo_hi()
        if args.out is None:
            write = sys.stdout
            write.write(f"# schema={bounds_mod.BOUNDS_CSV_SCHEMA}\n")
            writer = csv.writer(write)
            writer.writerow(["index", "f_lo", "f_hi", "holevo_lo", "holevo_hi"])
            for k in range(block):
                writer.writerow([k + 1, f"{f_lo[k]:.12g}", f"{f_hi[k]:.12g}",
                                 f"{holevo_lo[k]:.12g}", f"{holevo_hi[k]:.12g}"])
        else:
            bounds_mod.write_bounds_csv(args.out, table)
    fractions = {}
    for delta in SUMMARY_DELTAS:
        good = holevo_lo > 1.0 - delta
        bad = holevo_lo < delta if holevo_hi is None else holevo_hi < delta
        fractions[f"good@{delta}"] = float(np.mean(good))
        fractions[f"bad@{delta}"] = float(np.mean(bad))
    summary = {"schema": POLARIZE_SUMMARY_SCHEMA, "channel": args.channel, "n": args.n,
               "backend": args.backend, "fractions": fractions}
    print(json.dumps(summary, sort_keys=True))
    if args.out and not args.no_fig:
        from . import figures
        figures.save_polarization_figure(
            args.fig or _default_figure_path(args.out), f_hi=f_hi, holevo_lo=holevo_lo,
            f_lo=f_lo, holevo_hi=holevo_hi,
            title=f"{args.channel}, N={block}, backend={args.backend}")
    return 0


def cmd_construct(args) -> int:
    channel = parse_channel(args.channel)
    budget = Budget.from_env()
    info_count = _resolve_info_count(args, 1 << args.n)
    try:
        report = construct_code(channel, args.n, info_count, backend=args.backend,
                                frozen_policy=args.frozen, seed=args.seed, budget=budget)
    except BudgetExceeded as exc:
        raise SystemExit(f"backend {args.backend!r} infeasible for n={args.n}: {exc}")
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        lo = report.reliabilities_lo
        rows = [(i + 1,
                 f"{(report.reliabilities[i] if lo is None else lo[i]):.12g}",
                 f"{report.reliabilities[i]:.12g}")
                for i in range(report.spec.block_length)]
        _write_rows(args.csv, RELIABILITY_CSV_SCHEMA, ["index", "f_lo", "f_hi"], rows)
    return 0


def cmd_decode(args) -> int:
    channel = parse_channel(args.channel)
    budget = Budget.from_env()
    info_count = _resolve_info_count(args, 1 << args.n)
    construction = construct_code(channel, args.n, info_count, backend=args.backend,
                                  frozen_policy=args.frozen, seed=args.seed, budget=budget)
    spec = construction.spec
    report = decode_monte_carlo(channel, spec, trials=args.trials, seed=args.seed,
                                budget=budget, sen_checks=not args.no_sen,
                                keep_trajectories=args.keep_trajectories)
    report = replace(report, prop_bound=construction.error_bound)
    if not args.skip_exact:
        try:
            report = replace(report, exact_block_error=exact_block_error(channel, spec, budget))
        except BudgetExceeded:
            pass
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.trajectories:
        write_trajectory_csv(args.trajectories, report.trajectories)
    return 0


def cmd_verify(args) -> int:
    rows = verify_mod.run_suites(selector=args.suite, seed=args.seed, mutate=args.mutate)
    print(verify_mod.format_table(rows))
    if args.json:
        doc = {"schema": "cqpolar.verify/1",
               "checks": [{"suite": r.suite, "proposition": r.proposition,
                           "channel": r.channel, "n": r.level,
                           "max_violation": r.max_violation, "tolerance": r.tolerance,
                           "passed": r.passed} for r in rows]}
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0 if all(r.passed for r in rows) else 1


def cmd_bounds_vs_exact(args) -> int:
    channel = parse_channel(args.channel)
    budget = Budget.from_env()
    try:
        params = split_params(channel, args.n, budget)
    except BudgetExceeded as exc:
        raise SystemExit(f"exact synthesis infeasible for n={args.n}: {exc}")
    exact = np.array([p.root_fidelity for p in params])
    table = bounds_mod.propagate_all(root_channel_fidelity(channel), args.n)
    rows = []
    for k in range(len(table)):
        contained = table.f_lo[k] - 1e-9 <= exact[k] <= table.f_hi[k] + 1e-9
        rows.append((k + 1, f"{exact[k]:.12g}", f"{table.f_lo[k]:.12g}",
                     f"{table.f_hi[k]:.12g}", int(contained)))
    _write_rows(args.out, COMPARE_CSV_SCHEMA,
                ["index", "exact_f", "f_lo", "f_hi", "contained"], rows)
    if args.out and not args.no_fig:
        from . import figures
        figures.save_bounds_vs_exact_figure(
            args.fig or _default_figure_path(args.out), exact, table.f_lo, table.f_hi,
            title=f"{args.channel}, N={1 << args.n}")
    return 0 if all(r[-1] for r in rows) else 1


def _add_channel_n(p: argparse.ArgumentParser, default_n: int | None = None) -> None:
    p.add_argument("--channel", required=True,
                   help="preset:param (bsc, bec, pure_overlap, bpsk) or JSON path")
    p.add_argument("--n", type=int, required=default_n is None, default=default_n,
                   help="number of polarization levels (block length 2^n)")


def _add_code_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--K", type=int, help="number of information bits")
    group.add_argument("--rate", type=float, help="code rate; K = floor(N * rate)")
    p.add_argument("--backend", choices=("exact", "bounds", "hybrid"), default="hybrid")
    p.add_argument("--frozen", choices=("zeros", "random"), default="zeros",
                   help="frozen-bit policy")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqpolar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("polarize", help="per-index rate/reliability sweep")
    _add_channel_n(p)
    p.add_argument("--backend", choices=("exact", "bounds", "hybrid"), default="hybrid")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.add_argument("--fig", help="figure path (default: CSV path with .png)")
    p.add_argument("--no-fig", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("construct", help="select the information set and bound the error")
    _add_channel_n(p)
    _add_code_args(p)
    p.add_argument("--out", help="construction report JSON path (stdout when omitted)")
    p.add_argument("--csv", help="optional per-index reliabilities CSV path")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("decode", help="simulate successive-cancellation decoding")
    _add_channel_n(p)
    _add_code_args(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--skip-exact", action="store_true",
                   help="do not compute the exact block error")
    p.add_argument("--no-sen", action="store_true",
                   help="skip the per-trial union-bound checks")
    p.add_argument("--out", help="error report JSON path (stdout when omitted)")
    p.add_argument("--trajectories", help="optional per-step trajectory CSV path")
    p.add_argument("--keep-trajectories", type=int, default=16,
                   help="number of trajectories retained for the CSV dump")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("verify", help="run the numerical verification suites")
    p.add_argument("--suite", default="all",
                   help="'all' or one of: " + ", ".join(verify_mod.SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mutate", action="store_true",
                   help="corrupt one fidelity on purpose (negative control)")
    p.add_argument("--json", help="optional JSON dump of all check rows")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds-vs-exact", help="compare certified intervals to exact values")
    _add_channel_n(p, default_n=3)
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.add_argument("--fig", help="figure path (default: CSV path with .png)")
    p.add_argument("--no-fig", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_bounds_vs_exact)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
