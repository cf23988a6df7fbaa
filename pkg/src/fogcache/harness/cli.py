"""Command-line entry point: run, sweep, plot, oracle, gradcheck."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..baselines import brute_force_placement_oracle
from ..dqn import DuelingNet, grad_check
from ..env import Delays
from ..popularity import zipf_profile
from .config import ConfigError, ExperimentConfig, parse_config
from .plots import render_plots, render_sweep, render_timeseries
from .runner import run_experiment, sweep


def _load_config(args) -> ExperimentConfig:
    if args.config:
        config = parse_config(Path(args.config).read_text())
    else:
        config = ExperimentConfig()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seeds"] = (args.seed,)
    if getattr(args, "schemes", None):
        overrides["schemes"] = tuple(args.schemes.split(","))
    if overrides:
        config = config.replace(**overrides)
    return config


def _cmd_run(args) -> int:
    config = _load_config(args)
    csv_path = run_experiment(config, out_dir=args.out)
    print(f"wrote {csv_path}")
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    values = [int(v) for v in args.values.split(",")]
    summary = sweep(config, args.param, values, out_dir=args.out)
    print(f"wrote {summary}")
    return 0


def _cmd_plot(args) -> int:
    out_dir = Path(args.out) if args.out else Path(".")
    if args.kind == "sweep":
        path = render_sweep(args.csv, out_dir / "sweep.svg")
        print(f"wrote {path}")
    elif args.kind in ("delay", "gain"):
        path = render_timeseries(args.csv, out_dir / f"{args.kind}.svg",
                                 kind=args.kind, window=args.window)
        print(f"wrote {path}")
    else:
        for path in render_plots(args.csv, out_dir, window=args.window):
            print(f"wrote {path}")
    return 0


def _cmd_oracle(args) -> int:
    popularity = zipf_profile(args.alpha, args.n).probabilities
    n_cached, cached, delay = brute_force_placement_oracle(
        popularity, args.k, args.m, args.n, Delays(args.d_f, args.d_a),
        n_rows=args.rows)
    print(f"best n_cached: {n_cached}")
    print(f"best cached set: {sorted(cached)}")
    print(f"expected delay ({args.rows} rows): {delay:.6f} ms")
    return 0


def _cmd_gradcheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        net = DuelingNet.create(state_dim=9, n_actions=3, trunk=(12,),
                                head=8, rng=rng)
        states = rng.normal(size=(4, 9))
        actions = rng.integers(0, 3, size=4)
        targets = rng.normal(size=4)
        worst = max(worst, grad_check(net, states, actions, targets, h=args.h))
    print(f"max relative gradient error over {args.trials} nets: {worst:.3e}")
    return 0 if worst < 1e-4 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fogcache",
        description="Coded-caching simulator with federated RL placement")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment, write metrics CSV")
    run_p.add_argument("--config", help="config file (key = value lines)")
    run_p.add_argument("--seed", type=int, help="override: run this seed only")
    run_p.add_argument("--schemes", help="override: comma-separated scheme list")
    run_p.add_argument("--out", help="output directory")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="sweep one parameter")
    sweep_p.add_argument("--config", help="config file")
    sweep_p.add_argument("--param", required=True,
                         help="one of M, Z, K, V")
    sweep_p.add_argument("--values", required=True,
                         help="comma-separated integers")
    sweep_p.add_argument("--seed", type=int)
    sweep_p.add_argument("--schemes")
    sweep_p.add_argument("--out")
    sweep_p.set_defaults(func=_cmd_sweep)

    plot_p = sub.add_parser("plot", help="render SVG charts from a CSV")
    plot_p.add_argument("--csv", required=True)
    plot_p.add_argument("--kind", default="all",
                        choices=["delay", "gain", "sweep", "all"])
    plot_p.add_argument("--window", type=int, default=50,
                        help="rolling-mean window (slots)")
    plot_p.add_argument("--out")
    plot_p.set_defaults(func=_cmd_plot)

    oracle_p = sub.add_parser(
        "oracle", help="exhaustive placement optimum on a small instance")
    oracle_p.add_argument("--n", type=int, required=True)
    oracle_p.add_argument("--k", type=int, required=True)
    oracle_p.add_argument("--m", type=int, required=True)
    oracle_p.add_argument("--alpha", type=float, default=1.0)
    oracle_p.add_argument("--rows", type=int, default=1)
    oracle_p.add_argument("--d-f", type=float, default=5.0, dest="d_f")
    oracle_p.add_argument("--d-a", type=float, default=1.0, dest="d_a")
    oracle_p.set_defaults(func=_cmd_oracle)

    grad_p = sub.add_parser(
        "gradcheck", help="finite-difference check of the backprop")
    grad_p.add_argument("--trials", type=int, default=20)
    grad_p.add_argument("--h", type=float, default=1e-5)
    grad_p.add_argument("--seed", type=int, default=0)
    grad_p.set_defaults(func=_cmd_gradcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
