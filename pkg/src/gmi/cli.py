"""Command-line interface: ``gmi <subcommand> [flags]``.

Exit codes: 0 success, 1 input error, 2 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .alpha import DensityBounds, InfeasibleIntervalError, RateConstants, select_alpha
from .baselines import KdeConfig, TruthOracle, kde_gmi, mc_true_gmi
from .bench import CSV_COLUMNS, load_plan, run_sweep
from .divergence import property_sweep
from .fr import estimate_gmi
from .mst import DEFAULT_CUTOFF, PYTHON_CUTOFF, euclidean_mst
from .samples import ShuffleMode, SplitShuffleConfig, load_csv, load_points

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _pos_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=_seed, default=d(0), help="random seed (default 0)")
    p.add_argument("--output", choices=("json", "csv"), default=d("json"), help="output format (default json)")
    p.add_argument("--quiet", action="store_true", default=d(False), help="suppress diagnostics on stderr")


def _emit(args, obj: dict | list, rows: list[list] | None = None, header=None) -> None:
    if args.output == "json":
        json.dump(obj, sys.stdout, allow_nan=True)
        sys.stdout.write("\n")
        return
    w = csv.writer(sys.stdout, lineterminator="\n")
    if rows is None:
        header = list(obj.keys())
        rows = [[obj[k] for k in header]]
    if header is not None:
        w.writerow(header)
    w.writerows(rows)


def _diag(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


# ----------------------------------------------------------------------------
# subcommands


def cmd_estimate(args) -> int:
    data = load_csv(args.input, args.dx, args.dy)
    cfg = SplitShuffleConfig(args.alpha, args.seed, ShuffleMode(args.shuffle))
    est = estimate_gmi(data, cfg, clamp=args.clamp, backend=args.backend, cutoff=args.cutoff)
    _emit(args, est.as_dict())
    return EXIT_OK


def cmd_kde(args) -> int:
    data = load_csv(args.input, args.dx, args.dy)
    cfg = KdeConfig(bandwidth=args.bandwidth)
    value = kde_gmi(data, args.p, cfg)
    _emit(args, {"value": value, "p": args.p, "bandwidth": cfg.h(data.n, data.d), "n": data.n})
    return EXIT_OK


def cmd_truth(args) -> int:
    oracle = TruthOracle(args.rho, args.p, args.mc_samples, args.seed)
    value, se = mc_true_gmi(oracle)
    _emit(args, {"value": value, "std_error": se, "rho": args.rho, "p": args.p,
                 "mc_samples": args.mc_samples, "seed": args.seed})
    return EXIT_OK


def cmd_alpha(args) -> int:
    bounds = DensityBounds(args.cl_xy, args.cu_xy, args.cl_x, args.cu_x, args.cl_y, args.cu_y,
                           args.eta, args.d, args.volume, args.n)
    consts = RateConstants(c=args.c, c_prime=args.c_prime, c1=args.c1, c2=args.c2,
                           c_dprime=args.c_dprime, c1_prime=args.c1_prime, c_d=args.c_d)
    sol = select_alpha(bounds, consts, form=args.form)
    if sol.warning:
        _diag(args, f"warning: {sol.warning}")
    out = sol.as_dict()
    if args.output == "csv":
        _emit(args, out, [[sol.alpha_tilde, sol.case.value, sol.alpha_lo, sol.alpha_hi, sol.xi_lo, sol.xi_hi]],
              ["alpha_tilde", "case", "alpha_lo", "alpha_hi", "xi_lo", "xi_hi"])
    else:
        _emit(args, out)
    return EXIT_OK


def cmd_analytic(args) -> int:
    report = property_sweep(args.sweeps, args.seed, tol=args.tol)
    bad = [k for k, v in report["properties"].items() if v["violations"]]
    if bad:
        _diag(args, "violated: " + ", ".join(bad))
    if args.output == "csv":
        rows = [[k, v["instances"], v["violations"], v["worst"]] for k, v in report["properties"].items()]
        _emit(args, report, rows, ["property", "instances", "violations", "worst"])
    else:
        _emit(args, report)
    return EXIT_OK


def cmd_simulate(args) -> int:
    plan = load_plan(args.plan, seed=args.seed if args.seed_given else None, trials=args.trials)
    result = run_sweep(plan, workers=args.workers)
    for r in result.records:
        if r.skipped:
            _diag(args, f"skipped d={r.d} n={r.n} rho={r.rho} alpha={r.alpha}: {r.skipped}")
    if args.output == "csv":
        sys.stdout.write(result.to_csv(timing=not args.no_timing))
    else:
        recs = []
        for r in result.records:
            d = asdict(r)
            if args.no_timing:
                d["seconds"] = None
            recs.append({k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()})
        _emit(args, {"columns": list(CSV_COLUMNS), "records": recs})
    return EXIT_OK


def cmd_mst(args) -> int:
    pts = load_points(args.input)
    tree = euclidean_mst(pts, backend=args.backend, cutoff=args.cutoff)
    # the edge list defaults to CSV rows unless JSON was asked for explicitly
    if args.output == "csv" or not args.output_given:
        w = csv.writer(sys.stdout, lineterminator="\n")
        for (i, j), wt in zip(tree.edges.tolist(), tree.weights.tolist()):
            w.writerow([i, j, repr(wt)])
    else:
        _emit(args, {
            "n": tree.n,
            "total_weight": tree.total_weight,
            "edges": [[i, j, wt] for (i, j), wt in zip(tree.edges.tolist(), tree.weights.tolist())],
        })
    return EXIT_OK


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gmi", description="Geometric mutual information toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def data_flags(p):
        p.add_argument("--input", required=True, help="CSV file, one sample per row (x-block then y-block)")
        p.add_argument("--dx", type=int, required=True, help="number of x columns")
        p.add_argument("--dy", type=int, required=True, help="number of y columns")

    def mst_flags(p):
        p.add_argument("--backend", choices=("auto", "quadratic", "dualtree"), default="auto",
                       help="MST algorithm (default auto)")
        p.add_argument("--cutoff", type=int, default=None,
                       help=f"auto uses the kd-tree algorithm above this n (default {DEFAULT_CUTOFF} "
                       f"with the compiled extension, {PYTHON_CUTOFF} without)")

    p = sub.add_parser("estimate", parents=[common], help="FR estimate of I_alpha from a CSV sample")
    data_flags(p)
    p.add_argument("--alpha", type=float, required=True, help="fraction of rows kept unshuffled, in (0,1)")
    p.add_argument("--shuffle", choices=[m.value for m in ShuffleMode], default="perm",
                   help="perm: permute y-blocks; indep: draw x and y indices with replacement")
    p.add_argument("--clamp", action="store_true", help="truncate the estimate into [0, 1]")
    mst_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("baseline-kde", parents=[common], help="KDE plug-in estimate of I_p")
    data_flags(p)
    p.add_argument("--p", "--alpha", dest="p", type=float, default=0.5, help="divergence parameter p (default 0.5)")
    p.add_argument("--bandwidth", type=_pos_float, default=None, help="kernel bandwidth (default n^(-1/(d+1)))")
    p.set_defaults(func=cmd_kde)

    p = sub.add_parser("truth", parents=[common], help="Monte-Carlo I_p of a bivariate normal")
    p.add_argument("--rho", type=float, required=True, help="correlation in (-1, 1)")
    p.add_argument("--p", "--alpha", dest="p", type=float, default=0.5, help="divergence parameter p (default 0.5)")
    p.add_argument("--mc-samples", type=int, default=1_000_000, help="Monte-Carlo draws (default 1e6)")
    p.set_defaults(func=cmd_truth)

    p = sub.add_parser("alpha", parents=[common], help="minimax choice of alpha from density bounds")
    for name, hlp in (("cl-xy", "lower bound of the joint density"), ("cu-xy", "upper bound of the joint density"),
                      ("cl-x", "lower bound of f_X"), ("cu-x", "upper bound of f_X"),
                      ("cl-y", "lower bound of f_Y"), ("cu-y", "upper bound of f_Y")):
        p.add_argument(f"--{name}", type=_pos_float, required=True, help=hlp)
    p.add_argument("--eta", type=float, default=1.0, help="Hölder smoothness in (0, 1] (default 1)")
    p.add_argument("--d", type=int, required=True, help="total dimension dx + dy")
    p.add_argument("--n", type=int, required=True, help="sample size")
    p.add_argument("--volume", type=_pos_float, default=1.0, help="volume of the joint support (default 1)")
    for name in ("c", "c-prime", "c1", "c2", "c-dprime", "c1-prime"):
        p.add_argument(f"--{name}", type=_pos_float, default=1.0, help="rate constant (default 1)")
    p.add_argument("--c-d", type=_pos_float, default=None, help="MST degree constant (default: kissing number of d)")
    p.add_argument("--form", choices=("ratio", "inverse_ratio"), default="ratio",
                   help="argument convention of the bound kernel G~ (default ratio)")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("analytic", parents=[common], help="randomized checks of divergence properties")
    p.add_argument("--sweeps", type=int, default=1000, help="random instances per property (default 1000)")
    p.add_argument("--tol", type=float, default=1e-12, help="violation tolerance (default 1e-12)")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", parents=[common], help="run an MSE sweep from a plan file")
    p.add_argument("--plan", required=True, help="key = value plan file (see README)")
    p.add_argument("--trials", type=int, default=None, help="override the plan's trial count")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--no-timing", action="store_true", help="omit wall times for byte-identical output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mst", parents=[common], help="Euclidean MST of a CSV point set (edges as i,j,w)")
    p.add_argument("--input", required=True, help="CSV file, one point per row")
    mst_flags(p)
    p.set_defaults(func=cmd_mst)

    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    args.output_given = any(a == "--output" or a.startswith("--output=") for a in argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"gmi: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"gmi: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, InfeasibleIntervalError, InputError) as exc:
        print(f"gmi: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
