"""Plain and augmented gradient-type iterations for T x = y_delta.

All solvers share the discrepancy principle (stop at the first iterate with
residual norm <= tau * delta), a max-iteration cap and a stagnation guard.
The augmented variants carry a prepared recycle space (U, C): the
U-component of the solution is obtained by projection up front, and every
gradient step is deflected off span(U) so the iteration effectively runs on
the projected problem (I - Q) T t = (I - Q) y_delta.

Plain landweber / steepest_descent are the degenerate k = 0 case of the
same loop, which makes "augmenting with an empty space changes nothing"
hold bit-for-bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .harness import IterationTrace, TraceRow, discrepancy_stop
from .linops import LinearMap, deflate, norm_estimate
from .recycle import RecycleSpace, error_bounds

METHODS = ("landweber", "steepest_descent", "cgne",
           "aug_landweber", "aug_steepest_descent")

STOP_DISCREPANCY = "discrepancy"
STOP_MAX_ITERS = "max_iters"
STOP_STAGNATION = "stagnation"

REFRESH_EVERY = 50      # recompute the true residual this often
DRIFT_TOL = 1e-8        # recurred vs true residual, relative
STAGNATION_TOL = 1e-14  # relative residual change ...
STAGNATION_RUN = 10     # ... sustained for this many iterations


@dataclass
class SolveConfig:
    """Solver parameters.

    beta is the fixed Landweber step; None means 1/||op||^2, and any
    explicit value must satisfy 0 < beta < 2/||op||^2 for the operator the
    iteration actually runs on. tau > 1 scales the discrepancy threshold.
    """

    method: str = "landweber"
    beta: float | None = None
    tau: float = 1.5
    delta: float = 0.0
    max_iters: int = 200
    record_error: bool = True
    keep_iterates: bool = False

    def validate(self):
        if self.tau <= 1:
            raise ConfigError(f"tau must exceed 1, got {self.tau}")
        if self.delta < 0:
            raise ConfigError(f"delta must be nonnegative, got {self.delta}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class SolveResult:
    x: np.ndarray
    trace: IterationTrace
    stop_reason: str
    iterates: list = field(default_factory=list)


def _resolve_beta(cfg: SolveConfig, op: LinearMap) -> float:
    """Validate (or derive) the fixed step against 2/||op||^2."""
    nrm = norm_estimate(op)
    if nrm == 0.0:
        raise ConfigError("operator norm estimate is zero")
    limit = 2.0 / (nrm * nrm)
    if cfg.beta is None:
        return 0.5 * limit
    if not (0.0 < cfg.beta < limit):
        raise ConfigError(
            f"beta={cfg.beta} outside admissible interval (0, {limit:.6g}) "
            f"for operator norm ~{nrm:.6g}")
    return float(cfg.beta)


def _gradient_loop(op: LinearMap, rs: RecycleSpace, y_delta, x0,
                   cfg: SolveConfig, fixed_beta: float | None,
                   x_true=None) -> SolveResult:
    """Shared core of (augmented) Landweber and steepest descent.

    fixed_beta None selects the exact line-search step
    alpha = ||T* r||^2 / ||(I - Q) T T* r||^2. The residual is recurred and
    periodically recomputed from x; drift beyond DRIFT_TOL stops the solve.
    """
    cfg.validate()
    y = np.asarray(y_delta, dtype=np.float64)
    x = np.asarray(x0, dtype=np.float64).copy()
    started = time.perf_counter()
    record_error = cfg.record_error and x_true is not None

    def clock():
        return (time.perf_counter() - started) * 1e3

    def err(vec):
        return float(np.linalg.norm(vec - x_true)) if record_error else None

    # initial correction from the recycle space: x += U (r0, C), r -= C (r0, C)
    r = y - op.apply(x)
    u1 = rs.range_coeffs(r)
    x = x + rs.U.expand(u1)
    r = r - rs.C.expand(u1)

    trace = IterationTrace()
    iterates = [x.copy()] if cfg.keep_iterates else []
    res = float(np.linalg.norm(r))
    trace.append(TraceRow(0, res, err(x), 0.0, clock()))
    stop = None
    if discrepancy_stop(trace[0], cfg.tau, cfg.delta):
        stop = STOP_DISCREPANCY

    flat_run = 0
    i = 0
    while stop is None:
        if i >= cfg.max_iters:
            stop = STOP_MAX_ITERS
            break
        i += 1
        if i % REFRESH_EVERY == 0:
            r_true = y - op.apply(x)
            if rs.k:
                r_true = r_true - rs.C.expand(rs.range_coeffs(r_true))
            drift = np.linalg.norm(r - r_true)
            r = r_true
            if drift > DRIFT_TOL * max(np.linalg.norm(r_true), 1e-300):
                res = float(np.linalg.norm(r))
                trace.append(TraceRow(i, res, err(x), 0.0, clock()))
                if cfg.keep_iterates:
                    iterates.append(x.copy())
                stop = STOP_STAGNATION
                break

        s = op.apply_adjoint(r)            # T* r, the descent direction
        w = op.apply(s)                    # T T* r
        w_hat = rs.range_coeffs(w)
        w_defl = w - rs.C.expand(w_hat)    # (I - Q) T T* r
        if fixed_beta is None:
            denom = float(w_defl @ w_defl)
            if denom == 0.0:
                stop = STOP_STAGNATION     # r is unreachable by a descent step
                break
            alpha = float(s @ s) / denom
        else:
            alpha = fixed_beta
        x = x + alpha * s - alpha * rs.U.expand(w_hat)
        r = r - alpha * w_defl

        new_res = float(np.linalg.norm(r))
        row = TraceRow(i, new_res, err(x), alpha, clock())
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


def landweber(op: LinearMap, y_delta, x0, cfg: SolveConfig,
              x_true=None) -> SolveResult:
    """Fixed-step gradient descent x_{k+1} = x_k + beta T*(y_delta - T x_k).

    beta must lie in (0, 2/||T||^2); the bound is checked against a
    power-iteration estimate before any iteration runs.
    """
    beta = _resolve_beta(cfg, op)
    rs = RecycleSpace.empty(op.dim_domain, op.dim_range)
    return _gradient_loop(op, rs, y_delta, x0, cfg, beta, x_true)


def steepest_descent(op: LinearMap, y_delta, x0, cfg: SolveConfig,
                     x_true=None) -> SolveResult:
    """Gradient descent with the residual-minimizing step length
    alpha = (r, T T* r) / (T T* r, T T* r)."""
    rs = RecycleSpace.empty(op.dim_domain, op.dim_range)
    return _gradient_loop(op, rs, y_delta, x0, cfg, None, x_true)


def augmented_landweber(op: LinearMap, rs: RecycleSpace, y_delta, x0,
                        cfg: SolveConfig, x_true=None) -> SolveResult:
    """Landweber with a recycle space: initial correction from span(U),
    then fixed-step iteration on the deflated problem.

    Equals x_p^delta plus plain Landweber applied to (I - Q) T, with the
    iteratively built part re-projected off span(U). beta admissibility is
    checked against the deflated operator.
    """
    beta = _resolve_beta(cfg, deflate(op, rs.apply_Q)) if rs.k else \
        _resolve_beta(cfg, op)
    return _gradient_loop(op, rs, y_delta, x0, cfg, beta, x_true)


def augmented_steepest_descent(op: LinearMap, rs: RecycleSpace, y_delta, x0,
                               cfg: SolveConfig, x_true=None) -> SolveResult:
    """Steepest descent over the enlarged space span(U) + span{T* r}.

    Each step minimizes the residual norm over that sum, realized as the
    exact line search for the deflated problem plus a rank-k correction;
    the running residual stays orthogonal to span(C).
    """
    return _gradient_loop(op, rs, y_delta, x0, cfg, None, x_true)


def cgne(op: LinearMap, y_delta, cfg: SolveConfig, x_true=None) -> SolveResult:
    """Conjugate gradients on the normal equations T*T x = T* y_delta,
    anchored at x0 = 0 so iterate j lies in the Krylov space
    K_j(T*T, T* y_delta)."""
    cfg.validate()
    y = np.asarray(y_delta, dtype=np.float64)
    x = np.zeros(op.dim_domain)
    started = time.perf_counter()
    record_error = cfg.record_error and x_true is not None

    def err(vec):
        return float(np.linalg.norm(vec - x_true)) if record_error else None

    r = y.copy()                  # residual of the original problem
    s = op.apply_adjoint(r)       # residual of the normal equations
    p = s.copy()
    gamma = float(s @ s)

    trace = IterationTrace()
    iterates = [x.copy()] if cfg.keep_iterates else []
    res = float(np.linalg.norm(r))
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
        q = op.apply(p)
        curv = float(q @ q)
        if curv == 0.0 or gamma == 0.0:
            stop = STOP_STAGNATION
            break
        alpha = gamma / curv
        x = x + alpha * p
        r = r - alpha * q
        s = op.apply_adjoint(r)
        gamma_new = float(s @ s)
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new

        new_res = float(np.linalg.norm(r))
        row = TraceRow(i, new_res, err(x), alpha,
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


def augmented_regularize(inner, rs: RecycleSpace, op: LinearMap, y_delta,
                         delta: float, cfg: SolveConfig,
                         op_norm: float | None = None) -> SolveResult:
    """Generic augmentation wrapper around any regularizing inner solver.

    Computes the projected part x_p = U (y_delta, C), forms the deflated
    problem (I - Q) T t = y_delta - T x_p, runs ``inner`` on it with the
    inflated noise level kappa_U * delta, and recombines
    x = x_p + (I - P)(inner iterate). ``inner`` must have the signature
    inner(op, data, x0, cfg) -> SolveResult.
    """
    y = np.asarray(y_delta, dtype=np.float64)
    if op_norm is None:
        op_norm = norm_estimate(op)
    kappa = error_bounds(rs, op_norm, max(delta, 0.0)).kappa_U
    x_p = rs.initial_projection(y)
    y_p = op.apply(x_p)
    deflated = deflate(op, rs.apply_Q)
    inner_cfg = replace(cfg, delta=kappa * delta)
    result = inner(deflated, y - y_p, np.zeros(op.dim_domain), inner_cfg)
    correction = result.x - rs.apply_P(op, result.x)
    return SolveResult(x_p + correction, result.trace, result.stop_reason,
                       result.iterates)
