"""Command-line interface.

    batchbo lattice search --method alg6 --dim 10 --points 1000 --primes 50
    batchbo lattice gen --base 1,83,889 --points 1000 --out points.txt
    batchbo run --config run.cfg --seeds 1,2,3 --out results/
    batchbo suite --config run.cfg --reps 30 --out results/

Exits 0 on success; on error prints a one-line diagnostic and exits 1.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import harness, lattice
from .errors import InputError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batchbo")
    sub = parser.add_subparsers(dest="command", required=True)

    lat = sub.add_parser("lattice", help="rank-1 lattice searches and generation")
    lat_sub = lat.add_subparsers(dest="lattice_command", required=True)

    search = lat_sub.add_parser("search", help="search for a large-separation lattice")
    search.add_argument("--method", choices=("alg6", "alg7", "korobov", "scs"), required=True)
    search.add_argument("--dim", type=int, required=True)
    search.add_argument("--points", type=int, required=True)
    search.add_argument("--primes", type=int, default=50)
    search.add_argument("--scs-iters", type=int, default=None,
                        help="refinement sweeps (default: 3 for alg7, 150 for scs)")

    gen = lat_sub.add_parser("gen", help="generate lattice points from a base vector")
    gen.add_argument("--base", required=True, help="comma-separated integer base vector")
    gen.add_argument("--points", type=int, required=True)
    gen.add_argument("--out", required=True)

    runp = sub.add_parser("run", help="run the optimization loop for each seed")
    runp.add_argument("--config", required=True)
    runp.add_argument("--seeds", default=None, help="comma-separated seed list")
    runp.add_argument("--out", default=None, help="output directory for trace files")

    suite = sub.add_parser("suite", help="repeat a run and aggregate simple regret")
    suite.add_argument("--config", required=True)
    suite.add_argument("--reps", type=int, required=True)
    suite.add_argument("--out", default=None)
    return parser


def _cmd_lattice_search(args) -> int:
    if args.method in ("alg6", "alg7"):
        iters = args.scs_iters if args.scs_iters is not None else 3
        cfg = lattice.LatticeSearchConfig(
            dimension=args.dim,
            n_points=args.points,
            n_primes=args.primes,
            scs_iterations=iters,
        )
        lat, base = (lattice.search_alg6 if args.method == "alg6" else lattice.search_alg7)(cfg)
    elif args.method == "korobov":
        lat, base = lattice.search_korobov(args.dim, args.points)
    else:
        iters = args.scs_iters if args.scs_iters is not None else 150
        lat, base = lattice.search_scs(args.dim, args.points, iterations=iters)
    rho = lat.separation
    print("base      =", ",".join(str(int(b)) for b in base))
    print(f"rho       = {rho:.5g}")
    print(f"2rho      = {2 * rho:.5g}")
    return 0


def _cmd_lattice_gen(args) -> int:
    base = np.array([int(v) for v in args.base.replace(",", " ").split()])
    lat = lattice.generate(base, args.points)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        for row in lat.points:
            fh.write(" ".join(harness.FLOAT_FMT % v for v in row) + "\n")
    print(f"wrote {lat.n_points} points to {out}")
    return 0


def _cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    if args.seeds:
        cfg = replace(cfg, seeds=tuple(int(s) for s in args.seeds.replace(",", " ").split()))
    out_dir = Path(args.out) if args.out else (Path(cfg.output_path) if cfg.output_path else None)
    for seed in cfg.seeds:
        trace = harness.run(cfg, seed)
        print(
            f"seed {seed}: final simple regret {trace.final_simple_regret:.6g} "
            f"after {len(trace)} evaluations"
        )
        if out_dir is not None:
            path = out_dir / f"trace_seed{seed}.tsv"
            harness.write_trace(trace, path)
            print(f"  trace -> {path}")
    return 0


def _cmd_suite(args) -> int:
    cfg = harness.load_config(args.config)
    result = harness.run_suite(cfg, repetitions=args.reps)
    final_mean = result["mean"][-1]
    final_err = result["stderr"][-1]
    print(
        f"{len(result['seeds'])} runs: final simple regret "
        f"{final_mean:.6g} +/- {final_err:.6g}"
    )
    out_dir = Path(args.out) if args.out else (Path(cfg.output_path) if cfg.output_path else None)
    if out_dir is not None:
        path = out_dir / "suite.tsv"
        harness.write_suite(result, path)
        print(f"aggregate -> {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "lattice":
            if args.lattice_command == "search":
                return _cmd_lattice_search(args)
            return _cmd_lattice_gen(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_suite(args)
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
