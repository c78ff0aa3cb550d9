"""Matrix-free linear operators with adjoints.

Every operator maps real coordinate vectors of length ``dim_domain`` to
vectors of length ``dim_range`` and exposes the adjoint action. The adjoint
identity ``<Tx, y> = <x, T*y>`` is the contract every concrete operator must
satisfy (tested randomized at 1e-10 relative).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, DimensionMismatchError


class LinearMap(ABC):
    """Abstract linear operator T between real coordinate spaces."""

    def __init__(self, dim_domain: int, dim_range: int):
        if dim_domain <= 0 or dim_range <= 0:
            raise ValueError("operator dimensions must be positive")
        self.dim_domain = int(dim_domain)
        self.dim_range = int(dim_range)
        self._norm_cache: dict = {}

    @abstractmethod
    def _forward(self, x: np.ndarray) -> np.ndarray:
        """Action x -> Tx, dimensions already validated."""

    @abstractmethod
    def _adjoint(self, y: np.ndarray) -> np.ndarray:
        """Action y -> T*y, dimensions already validated."""

    def apply(self, x) -> np.ndarray:
        """Return Tx. Raises DimensionMismatchError on a wrong-length input."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim_domain,):
            raise DimensionMismatchError("forward input", self.dim_domain, x.shape)
        return self._forward(x)

    def apply_adjoint(self, y) -> np.ndarray:
        """Return T*y. Raises DimensionMismatchError on a wrong-length input."""
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.dim_range,):
            raise DimensionMismatchError("adjoint input", self.dim_range, y.shape)
        return self._adjoint(y)

    def __repr__(self):
        return f"<{type(self).__name__} {self.dim_range}x{self.dim_domain}>"


class DenseOperator(LinearMap):
    """Operator backed by an explicit (m, n) matrix."""

    def __init__(self, matrix):
        a = np.array(matrix, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError("DenseOperator needs a 2-d matrix")
        super().__init__(a.shape[1], a.shape[0])
        self.matrix = a

    def _forward(self, x):
        return self.matrix @ x

    def _adjoint(self, y):
        return self.matrix.T @ y


class DiagonalOperator(LinearMap):
    """Square operator x -> d * x (entrywise). Self-adjoint."""

    def __init__(self, diag):
        d = np.array(diag, dtype=np.float64).ravel()
        super().__init__(d.size, d.size)
        self.diag = d

    def _forward(self, x):
        return self.diag * x

    def _adjoint(self, y):
        return self.diag * y


class DeflatedOperator(LinearMap):
    """Composition B = (I - Q) T for an idempotent range-space projector Q.

    ``q_apply`` must map range vectors to range vectors; the adjoint is
    y -> T*(I - Q)y, valid when Q is self-adjoint (orthogonal projector).
    """

    def __init__(self, op: LinearMap, q_apply):
        super().__init__(op.dim_domain, op.dim_range)
        self.base = op
        self.q_apply = q_apply

    def _forward(self, x):
        w = self.base._forward(x)
        return w - self.q_apply(w)

    def _adjoint(self, y):
        return self.base._adjoint(y - self.q_apply(y))


def deflate(op: LinearMap, q_apply) -> LinearMap:
    """Return the operator with forward x -> (I-Q)Tx and adjoint y -> T*(I-Q)y."""
    return DeflatedOperator(op, q_apply)


class NormalOperator(LinearMap):
    """The square self-adjoint composition x -> T*(Tx)."""

    def __init__(self, op: LinearMap):
        super().__init__(op.dim_domain, op.dim_domain)
        self.base = op

    def _forward(self, x):
        return self.base._adjoint(self.base._forward(x))

    _adjoint = _forward


@dataclass
class PsfGrid:
    """Dense point-spread-function sample grid.

    ``center`` is the (row, col) index holding the value of the PSF at the
    spatial origin; convolution offsets are measured from it.
    """

    rows: int
    cols: int
    values: np.ndarray
    center: tuple = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.rows, self.cols):
            raise ValueError(f"PSF grid shape {self.values.shape} != "
                             f"({self.rows}, {self.cols})")
        if self.center is None:
            self.center = (self.rows // 2, self.cols // 2)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("PSF contains non-finite values")
        if self.values.sum() <= 0:
            raise ValueError("PSF must have positive total mass")


def gaussian_psf(rows: int, cols: int, sigma: float) -> PsfGrid:
    """Sampled isotropic Gaussian, centered at (rows//2, cols//2), unit sum.

    Entry (i, j) is proportional to exp(-((i-cr)^2 + (j-cc)^2) / (2 sigma^2)).
    """
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    cr, cc = rows // 2, cols // 2
    di = (np.arange(rows) - cr)[:, None]
    dj = (np.arange(cols) - cc)[None, :]
    vals = np.exp(-(di * di + dj * dj) / (2.0 * sigma * sigma))
    vals /= vals.sum()
    return PsfGrid(rows, cols, vals, (cr, cc))


class ConvolutionOperator(LinearMap):
    """Periodic (circular) 2-d convolution of a row-major flattened image.

    Direct summation with periodic indexing; no FFT. The adjoint convolves
    with the point-reflected PSF, realized by negating the gather offsets.
    """

    def __init__(self, psf: PsfGrid, rows: int, cols: int):
        if psf.rows > rows or psf.cols > cols:
            raise DimensionMismatchError(
                "PSF larger than image", (rows, cols), (psf.rows, psf.cols))
        super().__init__(rows * cols, rows * cols)
        self.rows, self.cols = int(rows), int(cols)
        self.psf = psf

        cr, cc = psf.center
        aa, bb = np.nonzero(psf.values)  # row-major order from np.nonzero
        self.weights = psf.values[aa, bb].astype(np.float64)
        dr = (aa - cr).astype(np.int64)
        dc = (bb - cc).astype(np.int64)
        idx_r = np.arange(rows, dtype=np.int64)
        idx_c = np.arange(cols, dtype=np.int64)
        # out[i,j] = sum_k w_k * img[(i - dr_k) % rows, (j - dc_k) % cols]
        self._fwd_rows = (idx_r[None, :] - dr[:, None]) % rows
        self._fwd_cols = (idx_c[None, :] - dc[:, None]) % cols
        self._adj_rows = (idx_r[None, :] + dr[:, None]) % rows
        self._adj_cols = (idx_c[None, :] + dc[:, None]) % cols

    def _forward(self, x):
        img = x.reshape(self.rows, self.cols)
        out = _kernels.conv2d_periodic(img, self._fwd_rows, self._fwd_cols,
                                       self.weights)
        return out.ravel()

    def _adjoint(self, y):
        img = y.reshape(self.rows, self.cols)
        out = _kernels.conv2d_periodic(img, self._adj_rows, self._adj_cols,
                                       self.weights)
        return out.ravel()


def psf_operator(psf: PsfGrid, rows: int, cols: int) -> ConvolutionOperator:
    """Build the periodic convolution operator for images of shape (rows, cols)."""
    return ConvolutionOperator(psf, rows, cols)


def norm_estimate(op: LinearMap, iters: int = 200, seed: int = 0) -> float:
    """Power-iteration estimate of ||T|| = sqrt(lambda_max(T*T)).

    Deterministic given ``seed``; the result is cached on the operator, which
    is immutable after construction.
    """
    if iters < 1:
        raise ConfigError("norm_estimate needs iters >= 1")
    key = (iters, seed)
    cached = op._norm_cache.get(key)
    if cached is not None:
        return cached
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.dim_domain)
    nv = np.linalg.norm(v)
    if nv == 0.0:  # cannot happen with a continuous draw, kept for safety
        v[0] = 1.0
        nv = 1.0
    v /= nv
    lam = 0.0
    for _ in range(iters):
        w = op._adjoint(op._forward(v))
        lam = np.linalg.norm(w)
        if lam == 0.0:
            break
        v = w / lam
    result = float(np.sqrt(lam))
    op._norm_cache[key] = result
    return result
