"""Command-line front end.

Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import secrets
import sys

import numpy as np

from shotmax import __version__
from shotmax.discrete import max_process, scaled_path, simulate_walk
from shotmax.experiments import ModelParams, convergence_experiment, lepage_check, sandwich_experiment
from shotmax.fbm import SynthesisError
from shotmax.limit import FddQuery, QueryError, fdd_estimate, psi_curve, sample_limit_path
from shotmax.pathspace import ShapeError, skorohod_j1, sup_distance
from shotmax.rng import MAX_SEED
from shotmax.tableio import path_rows, read_path_csv, render

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _hurst(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"Hurst index must lie in the open interval (0, 1), got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--hurst", type=_hurst, default=0.5, help="Hurst index H in (0, 1)")
    g.add_argument("--kappa", type=float, default=1.0, help="upper tail constant kappa > 0")
    g.add_argument("--theta", type=float, default=1.0, help="upper-tail weight theta in (0, 1]")
    g.add_argument("--law", choices=["pure-pareto", "shifted-pareto", "pareto-with-negative-part"])
    g.add_argument("--negative-tail", choices=["light", "heavy"], default="light")
    g.add_argument("--increments", choices=["iid-gaussian", "fgn", "linear"])
    g.add_argument("--k", type=_nonneg_int, default=64, help="number of shot-noise points kept")
    g.add_argument("--grid", type=_positive_int, default=4096, help="grid points for limit paths")
    o = common.add_argument_group("run")
    o.add_argument("--seed", type=_seed, default=None, help="64-bit master seed")
    o.add_argument("--format", choices=["csv", "json"], default="csv")
    o.add_argument("--out", default="-", help="output path, '-' for stdout")
    o.add_argument("--threads", type=_positive_int, default=1, help="worker threads")

    parser = argparse.ArgumentParser(prog="shotmax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"shotmax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="sample a discrete or limit path")
    p.add_argument("--which", choices=["discrete", "limit"], required=True)
    p.add_argument("--n", type=_positive_int, default=1024, help="walk length")

    p = sub.add_parser("psi", parents=[common], help="estimate P(Z_1 <= x)")
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--reps", type=_positive_int, default=10_000)

    p = sub.add_parser("fdd", parents=[common], help="estimate a finite-dimensional probability")
    p.add_argument("--times", type=float, nargs="+", required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--reps", type=_positive_int, default=10_000)

    p = sub.add_parser("converge", parents=[common], help="terminal KS of Z_n vs Z across n")
    p.add_argument("--n-list", type=_positive_int, nargs="+", required=True)
    p.add_argument("--reps", type=_positive_int, default=5000)

    p = sub.add_parser("lepage", parents=[common], help="top order statistics vs Poisson points")
    p.add_argument("--n", type=_positive_int, default=16384)
    p.add_argument("--ranks", type=_positive_int, default=5)
    p.add_argument("--reps", type=_positive_int, default=5000)

    p = sub.add_parser("sandwich", parents=[common], help="percentiles of sup(Z^0 - Z^-inf)")
    p.add_argument("--n-list", type=_positive_int, nargs="+", required=True)
    p.add_argument("--reps", type=_positive_int, default=5000)

    p = sub.add_parser("pathdist", parents=[common], help="Skorohod J1 distance of two CSV paths")
    p.add_argument("path_a")
    p.add_argument("path_b")
    p.add_argument("--from", dest="a", type=float, default=0.0)
    p.add_argument("--to", dest="b", type=float, default=1.0)
    return parser


def _model(args) -> ModelParams:
    try:
        return ModelParams(
            H=args.hurst, kappa=args.kappa, theta=args.theta, law=args.law,
            negative_tail=args.negative_tail, increments=args.increments,
            k=args.k, grid_points=args.grid,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _meta(args, cfg: ModelParams | None) -> dict:
    meta = {"command": args.command, "version": __version__, "seed": args.seed}
    if cfg is not None:
        meta.update(
            hurst=float(cfg.H), kappa=cfg.kappa, theta=cfg.theta, law=cfg.noise().law,
            negative_tail=cfg.negative_tail, k=cfg.k, grid=cfg.grid_points,
        )
    skip = {"command", "seed", "format", "out", "threads", "hurst", "kappa", "theta", "law",
            "negative_tail", "k", "grid"}
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            meta[key] = value
    return meta


def _simulate(args, cfg):
    if args.which == "discrete":
        spec = cfg.walk(args.n)
        w = simulate_walk(spec, cfg.noise(), args.seed)
        args.increments = spec.increments
        return path_rows(scaled_path(max_process(w, include_origin=True), args.n, cfg.H))
    z, _ = sample_limit_path(cfg.H, cfg.kappa, cfg.k, cfg.grid_points, args.seed, cfg.theta)
    return path_rows(z)


def _psi(args, cfg):
    return [
        {"x": e.x, "psi_hat": e.value, "std_error": e.std_error,
         "replicates": e.replicates, "grid_points": e.grid_points}
        for e in psi_curve(cfg.H, cfg.kappa, args.x, args.reps, cfg.grid_points, args.seed, args.threads)
    ]


def _fdd(args, cfg):
    q = FddQuery(tuple(args.times), tuple(args.x))
    est = fdd_estimate(cfg.H, cfg.kappa, q, args.reps, cfg.grid_points, args.seed, args.threads)
    return [{"d": q.d, "times": list(q.times), "thresholds": list(q.thresholds),
             "probability": est.value, "std_error": est.std_error,
             "replicates": est.replicates, "grid_points": est.grid_points}]


def _converge(args, cfg):
    rows = convergence_experiment(cfg, args.n_list, args.reps, args.seed, threads=args.threads)
    return [{c: r[c] for c in ("n", "ks_statistic", "p_value", "reps")} for r in rows]


def _lepage(args, cfg):
    return lepage_check(cfg, args.n, args.ranks, args.reps, args.seed, threads=args.threads)


def _sandwich(args, cfg):
    return sandwich_experiment(cfg, args.n_list, args.reps, args.seed, threads=args.threads)


def _pathdist(args, cfg):
    paths = []
    for name in (args.path_a, args.path_b):
        try:
            with open(name, encoding="utf-8") as fh:
                paths.append(read_path_csv(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read {name}: {exc.strerror}") from None
    x, y = paths
    j1 = skorohod_j1(x, y, args.a, args.b)
    sup = sup_distance(x, y, args.a, args.b) if x.n_points == y.n_points else float("nan")
    return [{"j1": j1, "sup": sup, "n_points_a": x.n_points, "n_points_b": y.n_points}]


COMMANDS = {
    "simulate": _simulate, "psi": _psi, "fdd": _fdd, "converge": _converge,
    "lepage": _lepage, "sandwich": _sandwich, "pathdist": _pathdist,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = secrets.randbits(64)
    try:
        cfg = _model(args)
        if args.command in ("converge", "sandwich") and any(
            b <= a for a, b in zip(args.n_list, args.n_list[1:])
        ):
            raise UsageError("--n-list must be strictly increasing")
        if args.command == "fdd" and len(args.times) != len(args.x):
            raise UsageError("--times and --x must have the same length")
        if args.command == "lepage" and args.ranks > args.n:
            raise UsageError("--ranks must not exceed --n")
        rows = COMMANDS[args.command](args, cfg)
        text = render(rows, _meta(args, None if args.command == "pathdist" else cfg), args.format)
    except (UsageError, QueryError, ShapeError, ValueError) as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")
    except SynthesisError as exc:
        parser.exit(EXIT_NUMERICAL, f"{parser.prog} {args.command}: numerical failure: {exc}\n")
    if args.out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
