"""Experiment harness: generate kernel matrices, run solves, write CSV rows.

Rows record iteration counts, convergence, wall times, and (when the size
permits) the spectral-norm gap against a directly computed inverse.  Solver
failures and budget violations are recorded per row instead of aborting the
whole experiment.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, fields

import numpy as np

from .exceptions import OutOfMemoryBudget
from .kernels import KernelSpec, grid_1d, grid_2d, kernel_matrix
from .linalg import condition_number_2, spd_inverse, two_norm
from .partition import contiguous_partition
from .solver import IbmiConfig, solve

__all__ = [
    "ExperimentRow",
    "ExperimentSpec",
    "compare_direct",
    "emit_csv",
    "load_csv_rows",
    "run_experiment",
    "spec_from_json",
]

DEFAULT_MEMORY_BUDGET = 4 << 30

# Rough per-solve footprint: A, the approximation, cached block data and
# temporaries come to a few copies of the full matrix.
_SOLVE_COPIES = 8
_DIRECT_COPIES = 3


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    kernel: KernelSpec
    data_dim: int = 1
    sizes: tuple[int, ...] = ()
    partition_grid: tuple[tuple[int, float], ...] = ((2, 0.2),)
    guess: str = "identity"
    tol: float = 1e-8
    repeats: int = 1
    max_iterations: int = 500
    compute_direct: bool = True
    with_condition: bool = False
    memory_budget: int = DEFAULT_MEMORY_BUDGET

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("experiment needs at least one matrix size")
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        if self.data_dim not in (1, 2):
            raise ValueError(f"data_dim must be 1 or 2, got {self.data_dim}")


@dataclass
class ExperimentRow:
    p: int
    kernel: str
    k: int
    overlap: float
    guess: str
    iterations: int
    converged: bool
    final_error_vs_direct: float | None = None
    solve_seconds: float = 0.0
    direct_seconds: float | None = None
    cond_estimate: float | None = None
    note: str = ""


def _estimate_bytes(p: int, with_direct: bool) -> int:
    copies = _SOLVE_COPIES + (_DIRECT_COPIES if with_direct else 0)
    return 8 * p * p * copies


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRow]:
    """Run every (size, blocks, overlap) cell of the experiment grid."""
    rows: list[ExperimentRow] = []
    for p in spec.sizes:
        pts = grid_1d(p) if spec.data_dim == 1 else grid_2d(p)
        a = kernel_matrix(spec.kernel, pts)
        for k, overlap in spec.partition_grid:
            rows.append(_run_cell(spec, a, p, k, overlap))
    return rows


def _run_cell(spec: ExperimentSpec, a: np.ndarray, p: int, k: int, overlap: float) -> ExperimentRow:
    row = ExperimentRow(
        p=p, kernel=spec.kernel.family, k=k, overlap=overlap,
        guess=spec.guess, iterations=0, converged=False,
    )
    try:
        if _estimate_bytes(p, spec.compute_direct) > spec.memory_budget:
            raise OutOfMemoryBudget(
                f"p={p} needs ~{_estimate_bytes(p, spec.compute_direct)} bytes, "
                f"budget is {spec.memory_budget}"
            )
        part = contiguous_partition(p, k, overlap)
        cfg = IbmiConfig(
            tol=spec.tol, max_iterations=spec.max_iterations, initial_guess=spec.guess
        )
        report = None
        best = np.inf
        for _ in range(spec.repeats):
            start = time.perf_counter()
            candidate = solve(a, part, cfg)
            best = min(best, time.perf_counter() - start)
            report = report or candidate
        row.iterations = report.iterations
        row.converged = report.converged
        row.solve_seconds = best
        if spec.compute_direct:
            start = time.perf_counter()
            direct = spd_inverse(a)
            row.direct_seconds = time.perf_counter() - start
            row.final_error_vs_direct = two_norm(report.result - direct)
        if spec.with_condition:
            row.cond_estimate = condition_number_2(a)
    except Exception as exc:  # recorded, not fatal
        row.note = f"{type(exc).__name__}: {exc}"
    return row


def compare_direct(a, part, cfg: IbmiConfig | None = None) -> ExperimentRow:
    """One row comparing a solve against the explicit inverse of ``a``."""
    cfg = cfg or IbmiConfig()
    a = np.asarray(a, dtype=np.float64)
    start = time.perf_counter()
    report = solve(a, part, cfg)
    solve_seconds = time.perf_counter() - start
    start = time.perf_counter()
    direct = spd_inverse(a)
    direct_seconds = time.perf_counter() - start
    return ExperimentRow(
        p=a.shape[0],
        kernel="custom",
        k=part.k,
        overlap=part.overlap_fraction,
        guess=cfg.initial_guess,
        iterations=report.iterations,
        converged=report.converged,
        final_error_vs_direct=two_norm(report.result - direct),
        solve_seconds=solve_seconds,
        direct_seconds=direct_seconds,
    )


_COLUMNS = [f.name for f in fields(ExperimentRow)]


def emit_csv(rows: list[ExperimentRow], path) -> None:
    """Write rows as CSV with floats in shortest round-trip form."""
    if not rows:
        raise ValueError("refusing to write an empty result set")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_COLUMNS)
        for row in rows:
            writer.writerow([_format(getattr(row, name)) for name in _COLUMNS])


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def load_csv_rows(path) -> list[ExperimentRow]:
    """Inverse of :func:`emit_csv`, for round-tripping results."""
    rows = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                ExperimentRow(
                    p=int(record["p"]),
                    kernel=record["kernel"],
                    k=int(record["k"]),
                    overlap=float(record["overlap"]),
                    guess=record["guess"],
                    iterations=int(record["iterations"]),
                    converged=record["converged"] == "true",
                    final_error_vs_direct=_parse_optional(record["final_error_vs_direct"]),
                    solve_seconds=float(record["solve_seconds"]),
                    direct_seconds=_parse_optional(record["direct_seconds"]),
                    cond_estimate=_parse_optional(record["cond_estimate"]),
                    note=record["note"],
                )
            )
    return rows


def _parse_optional(text: str) -> float | None:
    return float(text) if text else None


def spec_from_json(source) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from a dict, JSON string, or file path."""
    if isinstance(source, dict):
        payload = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            payload = json.loads(text)
        else:
            with open(text) as fh:
                payload = json.load(fh)
    kernel = payload["kernel"]
    if isinstance(kernel, dict):
        kernel = KernelSpec(**kernel)
    else:
        kernel = KernelSpec(family=str(kernel))
    return ExperimentSpec(
        name=payload.get("name", "experiment"),
        kernel=kernel,
        data_dim=int(payload.get("data_dim", 1)),
        sizes=tuple(int(s) for s in payload["sizes"]),
        partition_grid=tuple(
            (int(k), float(f)) for k, f in payload.get("partition_grid", [(2, 0.2)])
        ),
        guess=payload.get("guess", "identity"),
        tol=float(payload.get("tol", 1e-8)),
        repeats=int(payload.get("repeats", 1)),
        max_iterations=int(payload.get("max_iterations", 500)),
        compute_direct=bool(payload.get("compute_direct", True)),
        with_condition=bool(payload.get("with_condition", False)),
        memory_budget=int(payload.get("memory_budget", DEFAULT_MEMORY_BUDGET)),
    )
