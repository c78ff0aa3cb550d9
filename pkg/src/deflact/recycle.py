"""Recycle-space construction: k-tuple calculus, QR against the operator,
the projector pair (P, Q), the initial projection and its error bounds,
plus strategies for choosing the subspace (Ritz vectors, dominant
eigenvectors, prior solutions).
"""

from __future__ import annotations

import csv
import logging
import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, RankDeficiencyError
from .gridio import read_rgrid, write_rgrid
from .linops import LinearMap

log = logging.getLogger(__name__)

RANK_TOL = 1e-12


class KTuple:
    """An ordered tuple of k vectors of common length n, stored as an
    (n, k) array of columns.

    Right-multiplication by a k-vector z expands the linear combination
    sum_i z_i * v_i. k = 0 is permitted (empty tuple) so that degenerate
    recycle spaces behave as "no augmentation".
    """

    def __init__(self, columns):
        arr = np.asarray(columns, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError("KTuple expects an (n, k) array of columns")
        self.arr = arr

    @classmethod
    def from_vectors(cls, vectors) -> "KTuple":
        """Build from an iterable of equal-length 1-d vectors."""
        vecs = [np.asarray(v, dtype=np.float64).ravel() for v in vectors]
        if not vecs:
            raise ValueError("empty vector list; use KTuple.empty(n) instead")
        n = vecs[0].size
        for i, v in enumerate(vecs):
            if v.size != n:
                raise DimensionMismatchError(f"vector {i}", n, v.size)
        return cls(np.stack(vecs, axis=1))

    @classmethod
    def empty(cls, n: int) -> "KTuple":
        return cls(np.zeros((n, 0)))

    @property
    def k(self) -> int:
        return self.arr.shape[1]

    @property
    def n(self) -> int:
        return self.arr.shape[0]

    def column(self, i: int) -> np.ndarray:
        return self.arr[:, i]

    def expand(self, z) -> np.ndarray:
        """sum_i z_i * v_i for a coefficient k-vector z."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape != (self.k,):
            raise DimensionMismatchError("coefficient vector", self.k, z.shape)
        return self.arr @ z

    def rmul(self, mat) -> "KTuple":
        """Right-multiply by a (k, m) matrix, producing a new m-tuple."""
        mat = np.asarray(mat, dtype=np.float64)
        return KTuple(self.arr @ mat)

    def __iter__(self):
        return (self.arr[:, i] for i in range(self.k))

    def __repr__(self):
        return f"<KTuple k={self.k} n={self.n}>"


def inner_products(x, tup: KTuple) -> np.ndarray:
    """Vector of inner products (<x, v_1>, ..., <x, v_k>)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (tup.n,):
        raise DimensionMismatchError("inner_products input", tup.n, x.shape)
    return tup.arr.T @ x


def gram(a: KTuple, b: KTuple) -> np.ndarray:
    """Matrix of pairwise inner products, entry (i, j) = <a_i, b_j>."""
    if a.n != b.n:
        raise DimensionMismatchError("gram operands", a.n, b.n)
    return a.arr.T @ b.arr


def _mgs(columns: np.ndarray, context: str):
    """Modified Gram-Schmidt with one full reorthogonalization pass.

    Returns (Q, R) with R upper triangular, positive diagonal. Raises
    RankDeficiencyError naming the offending column when a diagonal entry
    falls below RANK_TOL relative to the first column's norm.
    """
    n, k = columns.shape
    q = np.zeros((n, k))
    r = np.zeros((k, k))
    threshold = None
    for j in range(k):
        v = columns[:, j].copy()
        for i in range(j):
            cij = q[:, i] @ v
            v -= cij * q[:, i]
            r[i, j] += cij
        for i in range(j):  # second pass for orthogonality at roundoff level
            cij = q[:, i] @ v
            v -= cij * q[:, i]
            r[i, j] += cij
        nv = np.linalg.norm(v)
        if threshold is None:
            threshold = RANK_TOL * max(np.linalg.norm(columns[:, 0]), 1e-300)
        if nv <= threshold:
            raise RankDeficiencyError(j, nv, threshold, context)
        r[j, j] = nv
        q[:, j] = v / nv
    return q, r


@dataclass
class RecycleSpace:
    """A prepared augmentation pair (U, C) with C orthonormal and T U = C.

    ``r`` is the upper-triangular Gram-Schmidt factor of the raw image
    tuple T U_raw; U has already been rescaled by its inverse.
    """

    U: KTuple
    C: KTuple
    r: np.ndarray

    @property
    def k(self) -> int:
        return self.U.k

    @classmethod
    def empty(cls, dim_domain: int, dim_range: int) -> "RecycleSpace":
        return cls(KTuple.empty(dim_domain), KTuple.empty(dim_range),
                   np.zeros((0, 0)))

    def range_coeffs(self, w) -> np.ndarray:
        """(w, C): coefficients of the orthogonal projection onto span(C)."""
        return inner_products(w, self.C)

    def apply_Q(self, w) -> np.ndarray:
        """Orthogonal projection of a range vector onto span(C)."""
        if self.k == 0:
            return np.zeros(self.C.n)
        return self.C.expand(self.range_coeffs(w))

    def apply_P(self, op: LinearMap, v) -> np.ndarray:
        """Projection of a domain vector onto span(U), orthogonal in the
        T*T bilinear form; computed as U (Tv, C)."""
        if self.k == 0:
            return np.zeros(self.U.n)
        return self.U.expand(inner_products(op.apply(v), self.C))

    def initial_projection(self, y_delta) -> np.ndarray:
        """The cheaply computable U-component U (y_delta, C) of the solution."""
        if self.k == 0:
            return np.zeros(self.U.n)
        return self.U.expand(self.range_coeffs(y_delta))

    def save(self, directory) -> None:
        """Serialize as u_###.rg / c_###.rg / r.csv inside ``directory``."""
        os.makedirs(directory, exist_ok=True)
        for i in range(self.k):
            write_rgrid(os.path.join(directory, f"u_{i:03d}.rg"),
                        self.U.column(i)[None, :])
            write_rgrid(os.path.join(directory, f"c_{i:03d}.rg"),
                        self.C.column(i)[None, :])
        with open(os.path.join(directory, "r.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.r:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def load(cls, directory, dim_domain=None, dim_range=None) -> "RecycleSpace":
        u_files = sorted(f for f in os.listdir(directory) if f.startswith("u_"))
        c_files = sorted(f for f in os.listdir(directory) if f.startswith("c_"))
        if len(u_files) != len(c_files):
            raise ValueError(f"{directory}: mismatched u_/c_ file counts")
        if not u_files:
            if dim_domain is None or dim_range is None:
                raise ValueError(f"{directory}: empty recycle space needs "
                                 "explicit dimensions to load")
            return cls.empty(dim_domain, dim_range)
        u_cols = [read_rgrid(os.path.join(directory, f)).ravel() for f in u_files]
        c_cols = [read_rgrid(os.path.join(directory, f)).ravel() for f in c_files]
        k = len(u_files)
        r = np.zeros((k, k))
        with open(os.path.join(directory, "r.csv"), newline="") as fh:
            for i, row in enumerate(csv.reader(fh)):
                r[i, :] = [float(v) for v in row]
        return cls(KTuple.from_vectors(u_cols), KTuple.from_vectors(c_cols), r)


def build_recycle_space(op: LinearMap, raw_basis: KTuple,
                        drop_tol: float | None = None) -> RecycleSpace:
    """QR-factor T U_raw = C R by modified Gram-Schmidt and rescale
    U = U_raw R^{-1} so that T U = C with C orthonormal.

    By default, numerically dependent image columns raise
    RankDeficiencyError (the restricted operator is not injective on the
    span). With ``drop_tol`` set, candidate vectors whose operator image
    extends span(C) by less than drop_tol times the largest image norm are
    dropped instead; directions the operator barely resolves would inflate
    the rescaled U (and with it the noise amplification kappa_U) by the
    reciprocal of their image residual, so aggressive tolerances are the
    sane choice for recycle vectors harvested from prior solutions.
    """
    if raw_basis.k == 0:
        return RecycleSpace.empty(op.dim_domain, op.dim_range)
    if raw_basis.n != op.dim_domain:
        raise DimensionMismatchError("raw basis", op.dim_domain, raw_basis.n)
    if drop_tol is not None:
        images = [op.apply(u) for u in raw_basis]
        scale = max(np.linalg.norm(w) for w in images)
        kept = []
        basis_c: list = []
        for j, w in enumerate(images):
            v = w.copy()
            for _ in range(2):
                for c in basis_c:
                    v -= (c @ v) * c
            nv = np.linalg.norm(v)
            if nv <= drop_tol * scale:
                continue
            basis_c.append(v / nv)
            kept.append(j)
        if len(kept) < raw_basis.k:
            log.warning("build_recycle_space: dropped %d of %d vectors whose "
                        "images extend the range space below %.1e",
                        raw_basis.k - len(kept), raw_basis.k, drop_tol)
        if not kept:
            raise RankDeficiencyError(0, 0.0, drop_tol * scale,
                                      "all candidate images dependent")
        raw_basis = KTuple(raw_basis.arr[:, kept])
    images = np.stack([op.apply(u) for u in raw_basis], axis=1)
    c, r = _mgs(images, "QR of operator images")
    r_inv = np.linalg.solve(r, np.eye(raw_basis.k))
    return RecycleSpace(raw_basis.rmul(r_inv), KTuple(c), r)


@dataclass
class BoundReport:
    """Computable constants from the initial-projection error analysis."""

    init_proj_bound: float
    kappa_U: float
    gram_fro: float
    sum_u_norms: float
    inv_gram_fro: float


def error_bounds(rs: RecycleSpace, op_norm: float, delta: float) -> BoundReport:
    """Evaluate the noise-propagation constants of the recycle space.

    ``init_proj_bound`` bounds the distance between the exact-data and
    noisy-data initial projections; ``kappa_U`` is the factor by which the
    noise level is inflated when handed to the inner solver. Both retain
    the operator-norm factor from the proof chain (the displayed bound in
    the source analysis drops it, the proof does not).
    """
    if op_norm <= 0:
        raise ValueError("op_norm must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    gram_u = gram(rs.U, rs.U)
    gram_c = gram(rs.C, rs.C)
    gram_fro = float(np.linalg.norm(gram_u, "fro"))
    sum_u = float(np.trace(gram_u)) if rs.k else 0.0
    inv_fro = (float(np.linalg.norm(np.linalg.inv(gram_c), "fro"))
               if rs.k else 0.0)
    root = np.sqrt(gram_fro * sum_u)
    return BoundReport(
        init_proj_bound=root * inv_fro * op_norm * delta,
        kappa_U=1.0 + op_norm * root * inv_fro,
        gram_fro=gram_fro,
        sum_u_norms=sum_u,
        inv_gram_fro=inv_fro,
    )


def ritz_vectors(op: LinearMap, basis: KTuple, count: int) -> KTuple:
    """Ritz vectors of a square self-adjoint operator from span(basis).

    Galerkin condition: A v - lambda v is orthogonal to the subspace itself.
    Returns ``count`` vectors ordered by descending Ritz value.
    """
    if op.dim_domain != op.dim_range:
        raise ValueError("ritz_vectors needs a square operator")
    if count > basis.k:
        raise ValueError(f"count {count} exceeds subspace dimension {basis.k}")
    q, _ = _mgs(basis.arr.copy(), "Ritz subspace basis")
    aq = np.stack([op.apply(q[:, i]) for i in range(q.shape[1])], axis=1)
    h = q.T @ aq
    h = 0.5 * (h + h.T)
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]
    return KTuple(q @ vecs[:, order[:count]])


def top_eigenvectors(op: LinearMap, count: int, iters: int = 60,
                     seed: int = 0) -> KTuple:
    """Dominant eigenvectors of a square self-adjoint operator by block
    subspace iteration with a final Rayleigh-Ritz extraction.

    Pairs whose residual ||A v - lambda v|| exceeds 1e-6 are discarded, so
    fewer than ``count`` vectors may come back. Deterministic given ``seed``.
    """
    if op.dim_domain != op.dim_range:
        raise ValueError("top_eigenvectors needs a square operator")
    if count < 1:
        raise ValueError("count must be >= 1")
    n = op.dim_domain
    block = min(n, count + 4 + count // 4)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, block))
    z, _ = np.linalg.qr(z)
    for _ in range(iters):
        z = np.stack([op.apply(z[:, i]) for i in range(block)], axis=1)
        z, _ = np.linalg.qr(z)
    az = np.stack([op.apply(z[:, i]) for i in range(block)], axis=1)
    h = z.T @ az
    h = 0.5 * (h + h.T)
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]
    kept = []
    for idx in order:
        if len(kept) == count:
            break
        v = z @ vecs[:, idx]
        resid = np.linalg.norm(az @ vecs[:, idx] - vals[idx] * v)
        if resid <= 1e-6 * np.linalg.norm(v):
            kept.append(v)
    if len(kept) < count:
        log.warning("top_eigenvectors: %d of %d pairs failed the residual "
                    "check and were pruned", count - len(kept), count)
    if not kept:
        return KTuple.empty(n)
    return KTuple(np.stack(kept, axis=1))


def basis_from_solutions(solutions, limit: int | None = None) -> KTuple:
    """Euclidean-orthonormal basis of the span of prior solutions.

    Numerically dependent directions are dropped (logged, not fatal) since
    reconstructions of related problems routinely overlap. ``limit`` keeps
    only the most recent solutions, for windowed recycling.
    """
    vecs = [np.asarray(v, dtype=np.float64).ravel() for v in solutions]
    if limit is not None:
        vecs = vecs[-limit:]
    if not vecs:
        raise ValueError("no solutions given")
    n = vecs[0].size
    scale = max(np.linalg.norm(v) for v in vecs)
    if scale == 0.0:
        raise ValueError("all candidate solutions are zero")
    kept = []
    dropped = 0
    for v in vecs:
        if v.size != n:
            raise DimensionMismatchError("solution vector", n, v.size)
        w = v.copy()
        for q in kept:
            w -= (q @ w) * q
        for q in kept:
            w -= (q @ w) * q
        nw = np.linalg.norm(w)
        if nw <= RANK_TOL * scale:
            dropped += 1
            continue
        kept.append(w / nw)
    if dropped:
        log.warning("basis_from_solutions: dropped %d dependent direction(s)",
                    dropped)
    if not kept:
        raise ValueError("all candidate solutions are mutually dependent "
                         "with zero span")
    return KTuple(np.stack(kept, axis=1))
