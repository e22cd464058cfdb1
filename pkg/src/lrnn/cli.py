"""Command line entry point: ``lrnn run`` and ``lrnn sweep``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config, parse_items, with_overrides
from .errors import LRNNError
from .runner import run, sweep


def _csv_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _csv_ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--example", type=int)
    p.add_argument("--formulation", choices=("strong", "mixed"))
    p.add_argument("--m", type=int, help="hidden width per subdomain network")
    p.add_argument("--n-points", type=int, dest="N", help="total collocation points")
    p.add_argument("--d", type=int, help="dimension (Example 4)")
    p.add_argument("--beta", type=_csv_floats, help="comma-separated coefficients, innermost first")
    p.add_argument("--r1", type=float, help="weight range")
    p.add_argument("--r2", type=float, help="bias range")
    p.add_argument("--r3", type=float, help="flux weight range (mixed form)")
    p.add_argument("--r4", type=float, help="flux bias range (mixed form)")
    p.add_argument("--gamma", type=float, help="penalty weight for all constraint rows")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--solver", choices=("svd", "qr", "normal"))
    p.add_argument("--out")
    p.add_argument("--grid", type=int, dest="grid_resolution", help="dump a grid with this many points per axis")
    p.add_argument("--parallel-trials", action="store_true", default=None)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrnn", description="Randomized neural network solver for interface problems")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run independent trials of one example")
    _add_common(p_run)
    p_sweep = sub.add_parser("sweep", help="mean error over a grid of widths and point counts")
    _add_common(p_sweep)
    p_sweep.add_argument("--m-grid", type=_csv_ints, required=True)
    p_sweep.add_argument("--n-grid", type=_csv_ints, required=True)
    return parser


def config_from_args(args):
    overrides = []
    for item in args.set:
        if "=" not in item:
            raise LRNNError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides.append((k, v))
    parse_items(overrides)  # fail early on unknown keys
    cfg = load_config(args.config, overrides)
    rs = [args.r1, args.r2, args.r3, args.r4]
    r = None
    if any(v is not None for v in rs):
        given = [v for v in rs if v is not None]
        if rs[: len(given)] != given:
            raise LRNNError("--r1..--r4 must be given in order")
        r = tuple(given)
    return with_overrides(
        cfg,
        example=args.example,
        formulation=args.formulation,
        m=args.m,
        N=args.N,
        d=args.d,
        beta=args.beta,
        r=r,
        gamma=args.gamma,
        seed=args.seed,
        trials=args.trials,
        solver=args.solver,
        out=args.out,
        grid_resolution=args.grid_resolution,
        parallel_trials=args.parallel_trials,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
        if args.command == "run":
            man = run(cfg)
            for i, rec in enumerate(man.trials):
                print(f"trial {i} seed {rec['seed']}: relative L2 error {rec['error']:.3e}")
            print(f"mean relative L2 error {man.mean_error:.3e}")
            if man.mean_flux_error is not None:
                print(f"mean flux relative L2 error {man.mean_flux_error:.3e}")
            print(f"wrote {Path(cfg.out) / 'manifest.txt'}")
        else:
            path = Path(cfg.out) / "sweep.csv"
            table = sweep(cfg, args.m_grid, args.n_grid, path)
            for (n, m), e in table.items():
                print(f"N={n} m={m}: {e:.3e}")
            print(f"wrote {path}")
    except (LRNNError, KeyError, ValueError) as exc:
        print(f"lrnn: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
