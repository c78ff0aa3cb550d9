"""Stopping rules, trace bookkeeping, semiconvergence detection and the
noise-level sweep used to check the regularization property empirically.
"""

from __future__ import annotations

import concurrent.futures
import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

THREADS_ENV = "DEFLACT_THREADS"


@dataclass
class TraceRow:
    iter: int
    residual_norm: float
    error_norm: float | None = None
    alpha: float = 0.0
    wallclock_ms: float = 0.0
    stop: str = ""
    qr_rank: int | None = None


class IterationTrace:
    """Per-iteration record of a solve.

    Row 0 is the starting state (no step taken); iteration numbers increase
    strictly from 0 and residual norms are finite and nonnegative.
    """

    def __init__(self):
        self.rows: list[TraceRow] = []

    def append(self, row: TraceRow) -> None:
        if row.residual_norm < 0 or not np.isfinite(row.residual_norm):
            raise ValueError(f"bad residual norm {row.residual_norm}")
        expected = self.rows[-1].iter + 1 if self.rows else 0
        if row.iter != expected:
            raise ValueError(f"trace iteration {row.iter}, expected {expected}")
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i) -> TraceRow:
        return self.rows[i]

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]

    def residuals(self) -> np.ndarray:
        return np.array([r.residual_norm for r in self.rows])

    def errors(self) -> np.ndarray:
        return np.array([np.nan if r.error_norm is None else r.error_norm
                         for r in self.rows])

    def has_errors(self) -> bool:
        return any(r.error_norm is not None for r in self.rows)

    def has_qr_rank(self) -> bool:
        return any(r.qr_rank is not None for r in self.rows)


def discrepancy_stop(row: TraceRow, tau: float, delta: float) -> bool:
    """True iff the row's residual satisfies the discrepancy criterion
    residual <= tau * delta."""
    if tau <= 1:
        raise ConfigError(f"discrepancy needs tau > 1, got {tau}")
    if delta < 0:
        raise ConfigError(f"noise level must be nonnegative, got {delta}")
    return row.residual_norm <= tau * delta


def first_discrepancy_index(trace: IterationTrace, tau: float,
                            delta: float) -> int | None:
    """Scan the whole trace for the first qualifying iteration."""
    for row in trace.rows:
        if discrepancy_stop(row, tau, delta):
            return row.iter
    return None


def semiconvergence_index(trace: IterationTrace) -> int | None:
    """Iteration of the global error-norm minimum (smallest index on ties);
    None when no error data was recorded."""
    if not trace.has_errors():
        return None
    errors = trace.errors()
    valid = ~np.isnan(errors)
    if not valid.any():
        return None
    errs = np.where(valid, errors, np.inf)
    return int(np.argmin(errs))


def tstar_t_norm(op, v) -> float:
    """||v|| in the T*T bilinear form, i.e. ||Tv||. For theorem-level tests."""
    return float(np.linalg.norm(op.apply(v)))


@dataclass
class SweepRow:
    delta: float
    kappa_delta: float
    stop_iter: int
    final_error: float
    stop_reason: str


def _sweep_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        nt = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}={raw!r} is not an integer")
    return max(1, nt)


def delta_sweep(problem_family, run, deltas) -> list[SweepRow]:
    """Run a solver across a decreasing list of noise levels.

    ``problem_family(delta)`` must build the test problem for one noise
    level; ``run(problem)`` must execute the solve and return
    ``(SolveResult, kappa_delta)`` where kappa_delta is the effective noise
    level fed to the discrepancy rule. Points may execute concurrently
    (bounded by the DEFLACT_THREADS env var); results merge by delta order.
    """
    deltas = [float(d) for d in deltas]
    if any(d < 0 for d in deltas):
        raise ConfigError("sweep deltas must be nonnegative")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ConfigError("sweep deltas must be strictly decreasing")

    def point(delta):
        problem = problem_family(delta)
        result, kappa_delta = run(problem)
        if problem.x_true is not None:
            err = float(np.linalg.norm(problem.x_true - result.x))
        else:
            err = float("nan")
        return SweepRow(delta, float(kappa_delta), result.trace.final.iter,
                        err, result.stop_reason)

    nthreads = _sweep_threads()
    if nthreads == 1 or len(deltas) == 1:
        return [point(d) for d in deltas]
    with concurrent.futures.ThreadPoolExecutor(max_workers=nthreads) as pool:
        return list(pool.map(point, deltas))


# ---------------------------------------------------------------------------
# CSV formats

TRACE_HEADER = ["iter", "residual_norm", "error_norm", "alpha", "stop"]
SWEEP_HEADER = ["delta", "kappa_delta", "stop_iter", "final_error", "stop_reason"]


def _fmt(value) -> str:
    return repr(float(value))


def write_trace_csv(trace: IterationTrace, path) -> None:
    """Trace CSV; error_norm blank when unknown, stop set only on the final
    row, qr_rank column present only when some row carries it."""
    with_rank = trace.has_qr_rank()
    header = TRACE_HEADER + (["qr_rank"] if with_rank else [])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in trace.rows:
            out = [str(row.iter), _fmt(row.residual_norm),
                   "" if row.error_norm is None else _fmt(row.error_norm),
                   _fmt(row.alpha), row.stop]
            if with_rank:
                out.append("" if row.qr_rank is None else str(row.qr_rank))
            writer.writerow(out)


def read_trace_csv(path) -> IterationTrace:
    trace = IterationTrace()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:5] != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected trace header {header}")
        with_rank = len(header) > 5 and header[5] == "qr_rank"
        for rec in reader:
            trace.append(TraceRow(
                iter=int(rec[0]),
                residual_norm=float(rec[1]),
                error_norm=None if rec[2] == "" else float(rec[2]),
                alpha=float(rec[3]),
                stop=rec[4],
                qr_rank=(int(rec[5]) if with_rank and rec[5] != "" else None),
            ))
    return trace


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([_fmt(row.delta), _fmt(row.kappa_delta),
                             str(row.stop_iter), _fmt(row.final_error),
                             row.stop_reason])
