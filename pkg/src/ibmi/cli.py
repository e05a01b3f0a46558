"""Command-line interface.

Subcommands:

* ``gen``      write a kernel matrix to an IBMI1 or CSV file
* ``invert``   approximate the inverse of a stored SPD matrix
* ``analyze``  two-block convergence diagnostics and the cost model, as JSON
* ``bench``    run an experiment grid from a JSON spec, write CSV results
* ``compare``  one matrix, one partition: solve vs direct inversion

Exit codes: 0 success, 1 fatal error, 2 partial completion (some benchmark
rows recorded a failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import bench as bench_mod
from . import matio
from .analysis import contraction_factor, flop_cost, spectral_radius_condition
from .exceptions import InvalidOverlap
from .kernels import FAMILIES, DEFAULT_SIGMA, DEFAULT_TAU, KernelSpec, grid_1d, grid_2d, kernel_matrix
from .partition import (
    contiguous_partition,
    load_partition_json,
    red_black_partition,
)
from .solver import GUESS_CHOICES, GUESS_MONTE_CARLO, IbmiConfig, solve

__all__ = ["main"]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibmi",
        description="Iterative block inversion of dense SPD matrices",
    )
    sub = parser.add_subparsers(required=True)

    gen = sub.add_parser("gen", help="generate a covariance kernel matrix")
    gen.add_argument("--kernel", choices=FAMILIES, required=True)
    gen.add_argument("--size", type=int, required=True, help="matrix dimension p")
    gen.add_argument("--dim", type=int, choices=(1, 2), default=1, help="grid dimension")
    gen.add_argument("--sigma", type=float, default=DEFAULT_SIGMA, help="RBF length scale")
    gen.add_argument("--tau", type=float, default=DEFAULT_TAU, help="Matern length scale")
    gen.add_argument("--out", required=True, help="output file (.csv for CSV, else IBMI1)")
    gen.set_defaults(handler=_cmd_gen)

    invert = sub.add_parser("invert", help="approximate the inverse of a stored matrix")
    invert.add_argument("--in", dest="input", required=True)
    invert.add_argument("--out", help="file for the approximate inverse")
    invert.add_argument("--tol", type=float, default=1e-8)
    invert.add_argument("--max-iters", type=int, default=500)
    _add_partition_flags(invert)
    invert.add_argument(
        "--guess", default="identity",
        help="identity | local | mc:N:SEED | takahashi",
    )
    invert.add_argument("--report", help="write a JSON solve report here")
    invert.set_defaults(handler=_cmd_invert)

    analyze = sub.add_parser("analyze", help="two-block diagnostics as JSON")
    analyze.add_argument("--in", dest="input", required=True)
    analyze.add_argument("--blocks", type=int, default=2)
    analyze.add_argument("--overlap", type=float, default=0.0)
    analyze.add_argument("--out", help="JSON output path (default: stdout)")
    analyze.set_defaults(handler=_cmd_analyze)

    bench = sub.add_parser("bench", help="run an experiment grid from a JSON spec")
    bench.add_argument("--spec", required=True)
    bench.add_argument("--out", required=True, help="CSV results path")
    bench.set_defaults(handler=_cmd_bench)

    compare = sub.add_parser("compare", help="solve vs direct inversion for one matrix")
    compare.add_argument("--in", dest="input", required=True)
    compare.add_argument("--tol", type=float, default=1e-8)
    compare.add_argument("--max-iters", type=int, default=500)
    _add_partition_flags(compare)
    compare.add_argument("--guess", default="identity")
    compare.set_defaults(handler=_cmd_compare)
    return parser


def _add_partition_flags(cmd) -> None:
    cmd.add_argument("--blocks", type=int, default=2)
    cmd.add_argument("--overlap", type=float, default=0.0)
    cmd.add_argument(
        "--ordering", choices=("contiguous", "red-black"), default="contiguous"
    )
    cmd.add_argument("--partition-json", help="custom partition file overriding the flags")


def _cmd_gen(args) -> int:
    spec = KernelSpec(family=args.kernel, sigma=args.sigma, tau=args.tau)
    pts = grid_1d(args.size) if args.dim == 1 else grid_2d(args.size)
    matio.save_matrix(args.out, kernel_matrix(spec, pts))
    return 0


def _make_partition(args, p: int):
    if args.partition_json:
        return load_partition_json(args.partition_json)
    if args.ordering == "red-black":
        if args.overlap != 0.0:
            raise InvalidOverlap("red-black ordering does not support overlap")
        return red_black_partition(p)
    return contiguous_partition(p, args.blocks, args.overlap)


def _make_config(args) -> IbmiConfig:
    guess = args.guess
    mc_samples, mc_seed = 100, 0
    if guess.startswith(GUESS_MONTE_CARLO + ":") or guess == GUESS_MONTE_CARLO:
        parts = guess.split(":")
        guess = GUESS_MONTE_CARLO
        if len(parts) > 1 and parts[1]:
            mc_samples = int(parts[1])
        if len(parts) > 2 and parts[2]:
            mc_seed = int(parts[2])
    if guess not in GUESS_CHOICES:
        raise ValueError(f"unknown guess {args.guess!r}")
    return IbmiConfig(
        tol=args.tol,
        max_iterations=args.max_iters,
        initial_guess=guess,
        mc_samples=mc_samples,
        mc_seed=mc_seed,
    )


def _cmd_invert(args) -> int:
    a = matio.load_matrix(args.input)
    part = _make_partition(args, a.shape[0])
    report = solve(a, part, _make_config(args))
    if args.out:
        matio.save_matrix(args.out, report.result)
    if args.report:
        payload = {
            "iterations": report.iterations,
            "converged": report.converged,
            "error_trace": report.error_trace,
            "wall_times": report.wall_times,
            "total_seconds": report.total_seconds,
        }
        with open(args.report, "w") as fh:
            json.dump(payload, fh, indent=2)
    status = "converged" if report.converged else "NOT converged"
    print(
        f"{status} after {report.iterations} iteration(s); "
        f"last error estimate {report.error_trace[-1]:.6e}"
    )
    return 0


def _cmd_analyze(args) -> int:
    a = matio.load_matrix(args.input)
    p = a.shape[0]
    half = contiguous_partition(p, 2, 0.0)
    factor = contraction_factor(a, half.sets[0], half.sets[1])
    cost = flop_cost(p, args.blocks, args.overlap)
    payload = {
        "contraction_factor": factor,
        "bound_rate": factor**2,
        "spectral_radius": spectral_radius_condition(a, half.sets[0], half.sets[1]),
        "cost_model": {
            "k": cost.k,
            "m": cost.m,
            "h": cost.h,
            "per_step_flops": [float(x) for x in cost.per_step_flops],
            "total_flops": float(cost.total_flops),
            "direct_flops": float(cost.direct_flops),
        },
    }
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_bench(args) -> int:
    spec = bench_mod.spec_from_json(args.spec)
    rows = bench_mod.run_experiment(spec)
    bench_mod.emit_csv(rows, args.out)
    failures = sum(1 for row in rows if row.note)
    print(f"wrote {len(rows)} row(s) to {args.out}; {failures} failure(s)")
    return 2 if failures else 0


def _cmd_compare(args) -> int:
    a = matio.load_matrix(args.input)
    part = _make_partition(args, a.shape[0])
    row = bench_mod.compare_direct(a, part, _make_config(args))
    print(json.dumps(asdict(row), indent=2))
    return 0
