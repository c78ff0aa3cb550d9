"""Deterministic test-problem generation and on-disk problem directories.

Every generator is bit-reproducible given its parameters and seed. Exact
data is always computed by applying the stored operator to the stored
ground truth (no separately simulated right-hand side), so the
forward-consistency invariant holds by construction.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .gridio import read_rgrid, write_rgrid
from .linops import (DenseOperator, DiagonalOperator, LinearMap, PsfGrid,
                     gaussian_psf, psf_operator)
from .nonlinear import NonlinearMap

MANIFEST_NAME = "problem.manifest"


@dataclass
class TestProblem:
    op: object                      # LinearMap or NonlinearMap
    y_delta: np.ndarray
    delta: float
    label: str
    x_true: np.ndarray | None = None
    y_exact: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.y_exact is not None:
            gap = np.linalg.norm(self.y_delta - self.y_exact)
            if gap > self.delta * (1 + 1e-12) + 1e-300:
                raise ValueError(
                    f"noise norm {gap} exceeds declared delta {self.delta}")

    @property
    def delta_rel(self) -> float:
        if self.y_exact is None:
            return float("nan")
        scale = np.linalg.norm(self.y_exact)
        return float(self.delta / scale) if scale else float("nan")


def geometric_image(rows: int, cols: int) -> np.ndarray:
    """Concentric square rings of alternating intensity.

    ring(i, j) = min(i, j, rows-1-i, cols-1-j) // band with
    band = max(1, min(rows, cols) // 8); intensity 1.0 on even rings,
    0.0 on odd ones. Fixed here so stored goldens stay portable.
    """
    band = max(1, min(rows, cols) // 8)
    ii = np.arange(rows)[:, None]
    jj = np.arange(cols)[None, :]
    ring = np.minimum(np.minimum(ii, jj),
                      np.minimum(rows - 1 - ii, cols - 1 - jj)) // band
    return np.where(ring % 2 == 0, 1.0, 0.0).astype(np.float64)


def starfield_image(rows: int, cols: int, seed: int) -> np.ndarray:
    """One-pixel sources with log-uniform brightness in [1, 1e3].

    count = max(5, rows*cols // 128) seeded positions without replacement.
    """
    rng = np.random.default_rng(seed)
    count = max(5, (rows * cols) // 128)
    flat = rng.choice(rows * cols, size=count, replace=False)
    brightness = 10.0 ** rng.uniform(0.0, 3.0, size=count)
    img = np.zeros(rows * cols)
    img[flat] = brightness
    return img.reshape(rows, cols)


def _uniform_noise(rng, size: int, target_norm: float) -> np.ndarray:
    """Mean-centered uniform noise scaled to an exact norm.

    Centering removes the DC offset that periodic convolution would
    otherwise preserve exactly.
    """
    n = rng.random(size)
    n -= n.mean()
    nn = np.linalg.norm(n)
    if nn == 0.0:
        raise RuntimeError("degenerate noise draw")
    return n * (target_norm / nn)


def make_blur_problem(rows: int, cols: int, sigma: float, image="geometric",
                      delta_rel: float = 0.0, seed: int = 0) -> TestProblem:
    """Periodic Gaussian blur of a chosen ground-truth image.

    ``image`` is "geometric", "starfield" or "file:<path>" (an RGRID of the
    right shape). Noise is uniform, mean-centered, scaled so its norm is
    delta_rel * ||y_exact||; ``delta`` records that absolute norm.
    """
    if delta_rel < 0:
        raise ConfigError("delta_rel must be nonnegative")
    if image == "geometric":
        img = geometric_image(rows, cols)
    elif image == "starfield":
        img = starfield_image(rows, cols, seed)
    elif isinstance(image, str) and image.startswith("file:"):
        path = image[len("file:"):]
        try:
            img = read_rgrid(path)
        except OSError as exc:
            raise ConfigError(f"cannot read image file {path}: {exc}") from exc
        if img.shape != (rows, cols):
            raise ConfigError(f"image file {path} has shape {img.shape}, "
                              f"expected ({rows}, {cols})")
    else:
        raise ConfigError(f"unknown image kind {image!r}")

    psf = gaussian_psf(rows, cols, sigma)
    op = psf_operator(psf, rows, cols)
    x_true = img.ravel().copy()
    y_exact = op.apply(x_true)
    if delta_rel > 0:
        rng = np.random.default_rng(seed + 1)
        target = delta_rel * np.linalg.norm(y_exact)
        noise = _uniform_noise(rng, y_exact.size, target)
        y_delta = y_exact + noise
        delta = float(target)
    else:
        y_delta = y_exact.copy()
        delta = 0.0
    meta = {"kind": "blur", "rows": rows, "cols": cols, "sigma": float(sigma),
            "image": image if isinstance(image, str) else "file",
            "noise_mode": "rel", "noise_value": float(delta_rel),
            "seed": int(seed)}
    return TestProblem(op, y_delta, delta, f"blur{rows}x{cols}-s{sigma}",
                       x_true, y_exact, meta)


def make_diagonal_problem(singular_values, x_true, delta: float = 0.0,
                          seed: int = 0) -> TestProblem:
    """Diagonal operator with exact data and Gaussian-direction noise of
    exact norm ``delta``. The canonical solver oracle fixture."""
    sv = np.asarray(singular_values, dtype=np.float64).ravel()
    xt = np.asarray(x_true, dtype=np.float64).ravel()
    if sv.size != xt.size:
        raise ConfigError("singular_values and x_true lengths differ")
    if np.any(sv < 0):
        raise ConfigError("singular values must be nonnegative")
    op = DiagonalOperator(sv)
    y_exact = op.apply(xt)
    if delta > 0:
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal(sv.size)
        noise *= delta / np.linalg.norm(noise)
        y_delta = y_exact + noise
    else:
        y_delta = y_exact.copy()
    meta = {"kind": "diagonal", "n": sv.size, "noise_mode": "abs",
            "noise_value": float(delta), "seed": int(seed)}
    return TestProblem(op, y_delta, float(delta), f"diag{sv.size}",
                       xt, y_exact, meta)


class QuadraticPerturbationMap(NonlinearMap):
    """F(x) = T x + eps * (x * x) with derivative F'(x) v = T v + 2 eps x v."""

    def __init__(self, op: LinearMap, epsilon: float):
        super().__init__(op.dim_domain, op.dim_range)
        if op.dim_domain != op.dim_range:
            raise ConfigError("quadratic perturbation needs a square operator")
        self.op = op
        self.epsilon = float(epsilon)

    def forward(self, x):
        return self.op.apply(x) + self.epsilon * x * x

    def derivative_forward(self, x, v):
        return self.op.apply(v) + 2.0 * self.epsilon * x * v

    def derivative_adjoint(self, x, w):
        return self.op.apply_adjoint(w) + 2.0 * self.epsilon * x * w


def well_conditioned_dense(n: int, seed: int) -> DenseOperator:
    """Seeded dense map with singular values in [1, 2] (condition 2)."""
    rng = np.random.default_rng(seed)
    q1, _ = np.linalg.qr(rng.standard_normal((n, n)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return DenseOperator(q1 @ np.diag(np.linspace(1.0, 2.0, n)) @ q2.T)


def make_nonlinear_toy(n: int, epsilon: float, delta: float = 0.0,
                       seed: int = 0) -> TestProblem:
    """Mildly nonlinear exercise bed F(x) = T x + eps * (x * x) with a
    seeded well-conditioned dense T and seeded ground truth."""
    if epsilon < 0:
        raise ConfigError("epsilon must be nonnegative")
    op = well_conditioned_dense(n, seed)
    F = QuadraticPerturbationMap(op, epsilon)
    rng = np.random.default_rng(seed + 1)
    x_true = rng.uniform(0.5, 1.5, size=n)
    y_exact = F.forward(x_true)
    if delta > 0:
        noise = rng.standard_normal(n)
        noise *= delta / np.linalg.norm(noise)
        y_delta = y_exact + noise
    else:
        y_delta = y_exact.copy()
    meta = {"kind": "nltoy", "n": n, "epsilon": float(epsilon),
            "noise_mode": "abs", "noise_value": float(delta), "seed": int(seed)}
    return TestProblem(F, y_delta, float(delta), f"nltoy{n}",
                       x_true, y_exact, meta)


# ---------------------------------------------------------------------------
# Problem directories: key=value manifest plus RGRID payloads.

def _write_manifest(path, entries) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for key, value in entries:
            fh.write(f"{key} = {value}\n")


def _read_manifest(path) -> dict:
    entries = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries


def save_problem(problem: TestProblem, directory) -> None:
    """Write manifest + RGRID payloads. The operator is reconstructed from
    the manifest on load, so only generator parameters are stored."""
    meta = problem.meta
    kind = meta.get("kind")
    if kind not in ("blur", "diagonal", "nltoy"):
        raise ValueError(f"cannot serialize problem of kind {kind!r}")
    os.makedirs(directory, exist_ok=True)

    rows = int(meta.get("rows", 1))
    cols = int(meta.get("cols", meta.get("n", problem.y_delta.size)))
    shape = (rows, cols)

    entries = [("format", "deflact-problem v1"), ("kind", kind),
               ("label", problem.label)]
    for key in ("rows", "cols", "n", "sigma", "image", "epsilon"):
        if key in meta:
            entries.append((key, meta[key]))
    entries.append(("noise_mode", meta["noise_mode"]))
    entries.append(("noise_value", repr(float(meta["noise_value"]))))
    entries.append(("delta_abs", repr(float(problem.delta))))
    entries.append(("delta_rel", repr(float(problem.delta_rel))))
    entries.append(("seed", meta["seed"]))
    _write_manifest(os.path.join(directory, MANIFEST_NAME), entries)

    if problem.x_true is not None:
        write_rgrid(os.path.join(directory, "x_true.rg"),
                    problem.x_true.reshape(shape))
    if problem.y_exact is not None:
        write_rgrid(os.path.join(directory, "y_exact.rg"),
                    problem.y_exact.reshape(shape))
    write_rgrid(os.path.join(directory, "y_delta.rg"),
                problem.y_delta.reshape(shape))
    if kind == "blur":
        write_rgrid(os.path.join(directory, "psf.rg"), problem.op.psf.values)
    elif kind == "diagonal":
        write_rgrid(os.path.join(directory, "singular_values.rg"),
                    problem.op.diag[None, :])
    elif kind == "nltoy":
        write_rgrid(os.path.join(directory, "t.rg"), problem.op.op.matrix)


def load_problem(directory) -> TestProblem:
    manifest = _read_manifest(os.path.join(directory, MANIFEST_NAME))
    kind = manifest["kind"]

    def grid(name):
        path = os.path.join(directory, name)
        return read_rgrid(path).ravel() if os.path.exists(path) else None

    x_true = grid("x_true.rg")
    y_exact = grid("y_exact.rg")
    y_delta = grid("y_delta.rg")
    if y_delta is None:
        raise ValueError(f"{directory}: y_delta.rg missing")
    delta = float(manifest["delta_abs"])

    if kind == "blur":
        rows, cols = int(manifest["rows"]), int(manifest["cols"])
        psf_values = read_rgrid(os.path.join(directory, "psf.rg"))
        psf = PsfGrid(psf_values.shape[0], psf_values.shape[1], psf_values)
        op = psf_operator(psf, rows, cols)
    elif kind == "diagonal":
        sv = read_rgrid(os.path.join(directory, "singular_values.rg")).ravel()
        op = DiagonalOperator(sv)
    elif kind == "nltoy":
        matrix = read_rgrid(os.path.join(directory, "t.rg"))
        op = QuadraticPerturbationMap(DenseOperator(matrix),
                                      float(manifest["epsilon"]))
    else:
        raise ValueError(f"{directory}: unknown problem kind {kind!r}")

    meta = {"kind": kind, "noise_mode": manifest["noise_mode"],
            "noise_value": float(manifest["noise_value"]),
            "seed": int(manifest["seed"])}
    for key in ("rows", "cols", "n"):
        if key in manifest:
            meta[key] = int(manifest[key])
    for key in ("sigma", "epsilon"):
        if key in manifest:
            meta[key] = float(manifest[key])
    if "image" in manifest:
        meta["image"] = manifest["image"]
    return TestProblem(op, y_delta, delta, manifest.get("label", kind),
                       x_true, y_exact, meta)
