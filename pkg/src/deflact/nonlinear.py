"""Gradient descent for nonlinear problems F(x) = y and its augmented
variant with per-iteration re-factorization of the derivative images of
the recycle basis.

These methods are experimental: no convergence or regularization claim is
made for the augmented nonlinear iteration, and the CLI labels it as such.
"""

from __future__ import annotations

import time
from abc import ABC, abstractmethod

import numpy as np

from .errors import ConfigError, DivergenceError
from .harness import IterationTrace, TraceRow, discrepancy_stop
from .linops import LinearMap
from .recycle import KTuple, RecycleSpace, _mgs
from .solvers import (SolveConfig, SolveResult, STAGNATION_RUN,
                      STAGNATION_TOL, STOP_DISCREPANCY, STOP_MAX_ITERS,
                      STOP_STAGNATION)


class NonlinearMap(ABC):
    """Differentiable map F with matrix-free derivative actions.

    Implementations must satisfy the finite-difference contract
    (F(x + h v) - F(x)) / h -> F'(x) v and the adjoint identity
    <F'(x) v, w> = <v, F'(x)* w>.
    """

    def __init__(self, dim_domain: int, dim_range: int):
        self.dim_domain = int(dim_domain)
        self.dim_range = int(dim_range)

    @abstractmethod
    def forward(self, x) -> np.ndarray:
        """F(x)."""

    @abstractmethod
    def derivative_forward(self, x, v) -> np.ndarray:
        """F'(x) v."""

    @abstractmethod
    def derivative_adjoint(self, x, w) -> np.ndarray:
        """F'(x)* w."""


class LinearAsNonlinear(NonlinearMap):
    """Wrap a LinearMap as a (trivially differentiable) nonlinear map."""

    def __init__(self, op: LinearMap):
        super().__init__(op.dim_domain, op.dim_range)
        self.op = op

    def forward(self, x):
        return self.op.apply(x)

    def derivative_forward(self, x, v):
        return self.op.apply(v)

    def derivative_adjoint(self, x, w):
        return self.op.apply_adjoint(w)


class ProjectedNonlinearMap(NonlinearMap):
    """x -> (I - Q) F(x) with the chain-rule derivative (I - Q) F'(x).

    Q must be an idempotent self-adjoint map on the range space. Fréchet
    differentiability of F is an assumption carried over from the wrapped
    map, not something this wrapper can establish.
    """

    def __init__(self, base: NonlinearMap, q_apply):
        super().__init__(base.dim_domain, base.dim_range)
        self.base = base
        self.q_apply = q_apply

    def forward(self, x):
        w = self.base.forward(x)
        return w - self.q_apply(w)

    def derivative_forward(self, x, v):
        w = self.base.derivative_forward(x, v)
        return w - self.q_apply(w)

    def derivative_adjoint(self, x, w):
        return self.base.derivative_adjoint(x, w - self.q_apply(w))


def projected_operator(F: NonlinearMap, q_apply) -> NonlinearMap:
    """Deflate a nonlinear map by a range-space projector."""
    return ProjectedNonlinearMap(F, q_apply)


def _check_finite(i, vec, last_x):
    if not np.all(np.isfinite(vec)):
        raise DivergenceError(i, last_x)


def _finite_norm(i, r, last_x) -> float:
    # the norm itself can overflow even when entries are finite
    res = float(np.linalg.norm(r))
    if not np.isfinite(res):
        raise DivergenceError(i, last_x)
    return res


def gradient_descent(F: NonlinearMap, y_delta, x0, cfg: SolveConfig,
                     step_rule: str = "steepest", alpha: float | None = None,
                     x_true=None) -> SolveResult:
    """Nonlinear gradient descent x_{i+1} = x_i + alpha_i F'(x_i)* r_i with
    r recomputed as y - F(x) every iteration.

    step_rule "steepest" takes the exact line-search step of the local
    linearization, alpha_i = ||F'(x)* r||^2 / ||F'(x) F'(x)* r||^2;
    "fixed" uses the supplied constant alpha > 0.
    """
    cfg.validate()
    if step_rule not in ("steepest", "fixed"):
        raise ConfigError(f"unknown step rule {step_rule!r}")
    if step_rule == "fixed" and (alpha is None or alpha <= 0):
        raise ConfigError("fixed step rule needs alpha > 0")
    y = np.asarray(y_delta, dtype=np.float64)
    x = np.asarray(x0, dtype=np.float64).copy()
    started = time.perf_counter()
    record_error = cfg.record_error and x_true is not None

    def err(vec):
        return float(np.linalg.norm(vec - x_true)) if record_error else None

    fx = F.forward(x)
    _check_finite(0, fx, x)
    r = y - fx
    trace = IterationTrace()
    iterates = [x.copy()] if cfg.keep_iterates else []
    res = _finite_norm(0, r, x)
    trace.append(TraceRow(0, res, err(x), 0.0,
                          (time.perf_counter() - started) * 1e3))
    stop = None
    if discrepancy_stop(trace[0], cfg.tau, cfg.delta):
        stop = STOP_DISCREPANCY

    i = 0
    flat_run = 0
    while stop is None:
        if i >= cfg.max_iters:
            stop = STOP_MAX_ITERS
            break
        i += 1
        s = F.derivative_adjoint(x, r)
        if step_rule == "steepest":
            w = F.derivative_forward(x, s)
            denom = float(w @ w)
            if denom == 0.0:
                stop = STOP_STAGNATION
                break
            step = float(s @ s) / denom
        else:
            step = float(alpha)
        x_new = x + step * s
        fx = F.forward(x_new)
        _check_finite(i, fx, x)
        r = y - fx
        new_res = _finite_norm(i, r, x)
        x = x_new
        row = TraceRow(i, new_res, err(x), step,
                       (time.perf_counter() - started) * 1e3)
        trace.append(row)
        if cfg.keep_iterates:
            iterates.append(x.copy())
        if discrepancy_stop(row, cfg.tau, cfg.delta):
            stop = STOP_DISCREPANCY
            break
        if abs(new_res - res) <= STAGNATION_TOL * max(res, 1e-300):
            flat_run += 1
            if flat_run >= STAGNATION_RUN:
                stop = STOP_STAGNATION
                break
        else:
            flat_run = 0
        res = new_res

    trace.final.stop = stop
    return SolveResult(x, trace, stop, iterates)


def _derivative_space(F: NonlinearMap, x, raw: KTuple, iteration: int):
    """QR-factor F'(x) U_raw = C R and rescale U = U_raw R^{-1}.

    Rescaling always restarts from the original raw basis so span(U) cannot
    drift under repeated inverse applications.
    """
    images = np.stack([F.derivative_forward(x, raw.column(j))
                       for j in range(raw.k)], axis=1)
    c, r = _mgs(images, f"derivative images at iteration {iteration}")
    r_inv = np.linalg.solve(r, np.eye(raw.k))
    return RecycleSpace(raw.rmul(r_inv), KTuple(c), r)


def augmented_landweber(F: NonlinearMap, raw_basis: KTuple, y_delta, x0,
                        alpha: float, cfg: SolveConfig,
                        project_residual_in_correction: bool = True,
                        x_true=None) -> SolveResult:
    """Fixed-step nonlinear Landweber augmented with a fixed subspace.

    The sibling basis C_i = F'(x_i) U is re-factorized at every iteration;
    each step applies the deflected update
    x <- x + alpha F'(x)*(I-Q)r - alpha U (F'(x)F'(x)*(I-Q)r, C) and a final
    projection correction x <- x + U (r, C) runs after the loop.
    ``project_residual_in_correction=False`` feeds the un-deflected residual
    into the correction coefficients instead (the source text is ambiguous).
    """
    cfg.validate()
    if alpha <= 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    if raw_basis.k == 0:
        raise ConfigError("augmentation basis is empty")
    y = np.asarray(y_delta, dtype=np.float64)
    x = np.asarray(x0, dtype=np.float64).copy()
    started = time.perf_counter()
    record_error = cfg.record_error and x_true is not None

    def err(vec):
        return float(np.linalg.norm(vec - x_true)) if record_error else None

    def clock():
        return (time.perf_counter() - started) * 1e3

    fx = F.forward(x)
    _check_finite(0, fx, x)
    r = y - fx
    rs = _derivative_space(F, x, raw_basis, 0)
    x = x + rs.U.expand(rs.range_coeffs(r))
    fx = F.forward(x)
    _check_finite(0, fx, x)
    r = y - fx

    trace = IterationTrace()
    iterates = [x.copy()] if cfg.keep_iterates else []
    res = _finite_norm(0, r, x)
    trace.append(TraceRow(0, res, err(x), 0.0, clock(), qr_rank=rs.k))
    stop = None
    if discrepancy_stop(trace[0], cfg.tau, cfg.delta):
        stop = STOP_DISCREPANCY

    i = 0
    flat_run = 0
    while stop is None:
        if i >= cfg.max_iters:
            stop = STOP_MAX_ITERS
            break
        i += 1
        rs = _derivative_space(F, x, raw_basis, i)
        r_in = r - rs.apply_Q(r) if project_residual_in_correction else r
        s = F.derivative_adjoint(x, r_in)
        w = F.derivative_forward(x, s)
        w_hat = rs.range_coeffs(w)
        x = x + alpha * s - alpha * rs.U.expand(w_hat)
        fx = F.forward(x)
        _check_finite(i, fx, x)
        r = y - fx
        new_res = _finite_norm(i, r, x)
        row = TraceRow(i, new_res, err(x), alpha, clock(), qr_rank=rs.k)
        trace.append(row)
        if cfg.keep_iterates:
            iterates.append(x.copy())
        if discrepancy_stop(row, cfg.tau, cfg.delta):
            stop = STOP_DISCREPANCY
            break
        if abs(new_res - res) <= STAGNATION_TOL * max(res, 1e-300):
            flat_run += 1
            if flat_run >= STAGNATION_RUN:
                stop = STOP_STAGNATION
                break
        else:
            flat_run = 0
        res = new_res

    # closing correction from the final derivative factorization
    rs = _derivative_space(F, x, raw_basis, trace.final.iter + 1)
    x = x + rs.U.expand(rs.range_coeffs(r))
    fx = F.forward(x)
    _check_finite(trace.final.iter + 1, fx, x)
    r = y - fx
    trace.append(TraceRow(trace.final.iter + 1, _finite_norm(
        trace.final.iter + 1, r, x), err(x), 0.0, clock(), qr_rank=rs.k))
    if cfg.keep_iterates:
        iterates.append(x.copy())
    trace.final.stop = stop
    return SolveResult(x, trace, stop, iterates)
