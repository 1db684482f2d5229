"""distmat command line: approx, probe, gen-hard, bench.

Exit codes: 0 ok, 2 usage / bad input, 3 resource cap exceeded,
4 invariant check failed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import hardgen
from .bench import BenchSpec, run_bench, write_csv, write_plot_data
from .io import load_points_csv, read_matrix, write_dmat
from .metrics import DEFAULT_CAP, CapExceeded, DistanceOracle, make_oracle, materialize
from .norm_sampling import estimate_row_weights, estimate_row_weights_symmetric
from .pipeline import evaluate, low_rank_approx
from .sketch import SketchConfig

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_CHECK = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", help="point set CSV (header x0,...,x{d-1})")
    p.add_argument("--points-right", help="second point set for a bipartite matrix")
    p.add_argument("--matrix", help="dense matrix (DMAT or headerless CSV) instead of points")
    p.add_argument("--metric", choices=["l1", "l2", "linf", "canberra"],
                   help="metric for point inputs")


def _load_oracle(args) -> DistanceOracle:
    if args.matrix:
        if args.points or args.points_right:
            raise UsageError("--matrix cannot be combined with --points")
        return DistanceOracle.from_matrix(read_matrix(args.matrix))
    if not args.points:
        raise UsageError("one of --points or --matrix is required")
    if not args.metric:
        raise UsageError("--metric is required with --points")
    left = load_points_csv(args.points)
    right = load_points_csv(args.points_right) if args.points_right else left
    return make_oracle(left, right, args.metric)


def cmd_approx(args) -> int:
    oracle = _load_oracle(args)
    cfg = SketchConfig(args.k, args.eps, args.cr, args.cc)
    cfg.check(oracle.shape)
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    if args.repeats > 1 and not args.evaluate:
        raise UsageError("--repeats > 1 picks the best run and needs --evaluate")
    seeds = np.random.SeedSequence(args.seed).spawn(args.repeats) if args.repeats > 1 else [args.seed]
    best = None
    for attempt, seed in enumerate(seeds):
        factors = low_rank_approx(oracle, cfg, np.random.default_rng(seed) if args.repeats > 1 else seed)
        factors.seed = args.seed
        report = evaluate(oracle, factors, args.cap) if args.evaluate else None
        if best is None or report.err_sq < best[1].err_sq:
            best = (factors, report, attempt)
    factors, report, attempt = best
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_dmat(out / "V.dmat", factors.V)
    write_dmat(out / "U.dmat", factors.U)
    doc = report.to_dict() if report else {
        "err_sq": None, "opt_sq": None, "fro_sq": None, "excess": None,
        "ledger": factors.ledger, "times": factors.times,
        "config": factors.config, "seed": factors.seed}
    doc["shape"] = list(oracle.shape)
    doc["symmetric"] = oracle.symmetric
    doc["repeats"] = args.repeats
    doc["chosen_repeat"] = attempt
    if args.no_timings:
        doc["times"] = {key: 0.0 for key in doc["times"]}
    _dump(out / "report.json", doc)
    print(f"wrote {out}/V.dmat, U.dmat, report.json (seed {args.seed})")
    return EXIT_OK


def cmd_probe(args) -> int:
    oracle = _load_oracle(args)
    if oracle.symmetric and not args.bipartite:
        anchors = None if args.anchor_row is None else args.anchor_row
        weights = estimate_row_weights_symmetric(oracle, args.seed, anchor=anchors)
        factor = 4 * oracle.n
    else:
        anchors = None
        if args.anchor_row is not None or args.anchor_col is not None:
            if args.anchor_row is None or args.anchor_col is None:
                raise UsageError("--anchor-row and --anchor-col go together")
            anchors = (args.anchor_row, args.anchor_col)
        weights = estimate_row_weights(oracle, args.seed, anchors=anchors)
        factor = 4 * oracle.m
    doc = weights.to_dict()
    doc["seed"] = args.seed
    doc["symmetric"] = oracle.symmetric and not args.bipartite
    status = EXIT_OK
    if args.check:
        A = materialize(oracle, args.cap)
        row_sq = np.einsum("ij,ij->i", A, A)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(row_sq > 0, row_sq / (factor * weights.raw), 0.0)
        max_ratio = float(np.max(ratio))
        doc["check"] = {"max_ratio": max_ratio, "ok": max_ratio <= 1 + 1e-9}
        if not doc["check"]["ok"]:
            status = EXIT_CHECK
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if status == EXIT_CHECK:
        print(f"dominance check failed: max ratio {doc['check']['max_ratio']:.6g} > 1 "
              "(input is not a distance matrix)", file=sys.stderr)
    return status


def cmd_gen_hard(args) -> int:
    kind = hardgen.HardKind(args.kind)
    try:
        inst = hardgen.generate(kind, n=args.n, k=args.k, eps=args.eps, beta=args.beta,
                                C=args.C, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inst.params["seed"] = args.seed
    inst.save(args.out)
    print(f"wrote {args.out}/matrix.dmat ({inst.matrix.shape[0]}x{inst.matrix.shape[1]}) "
          f"and instance.json (seed {args.seed})")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        spec = BenchSpec.from_json(args.spec)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad bench spec: {exc}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_bench(spec, threads=args.threads)
    write_csv(rows, out / "results.csv", timings=not args.no_timings)
    if args.json:
        clean = [{key: (0.0 if key.startswith("t_") and args.no_timings else v) for key, v in r.items()}
                 for r in rows]
        _dump(out / "results.json", clean)
    if args.plot_data:
        write_plot_data(rows, out)
    print(f"wrote {len(rows)} rows to {out}/results.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distmat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="rank-k factors of a distance matrix")
    _add_input_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--cr", type=float, default=4.0, help="row oversampling constant")
    p.add_argument("--cc", type=float, default=4.0, help="column oversampling constant")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--evaluate", action="store_true", help="exact error via dense SVD")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max entries to materialize")
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--no-timings", action="store_true", help="write zero wall times")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("probe", help="row weights from one anchor row and column")
    _add_input_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true", help="verify ||A_i||^2 <= 4m raw[i]")
    p.add_argument("--bipartite", action="store_true", help="use the two-anchor weights on a symmetric input")
    p.add_argument("--anchor-row", type=int, help=argparse.SUPPRESS)
    p.add_argument("--anchor-col", type=int, help=argparse.SUPPRESS)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--out")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("gen-hard", help="generate a hard majority instance")
    p.add_argument("--kind", required=True, choices=[kd.value for kd in hardgen.HardKind])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=2, help="blocks (k-block kinds)")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_hard)

    p = sub.add_parser("bench", help="run a benchmark sweep from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=os.cpu_count())
    p.add_argument("--json", action="store_true", help="also write results.json")
    p.add_argument("--plot-data", action="store_true", help="per-metric k vs error CSVs")
    p.add_argument("--no-timings", action="store_true", help="write zero wall times")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"distmat {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"distmat {args.command}: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OSError, IndexError) as exc:
        print(f"distmat {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
