"""RGRID v1 file format.

One ASCII header line ``RGRID v1 <rows> <cols>\\n`` followed by
rows*cols raw IEEE-754 little-endian float64 values, row-major.
Used for PSFs, images, reconstructions and stored basis vectors.
"""

from __future__ import annotations

import numpy as np

MAGIC = b"RGRID v1"


def write_rgrid(path, values) -> None:
    """Write a 2-d float64 array to ``path`` in RGRID v1 format."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"RGRID stores 2-d grids, got ndim={arr.ndim}")
    rows, cols = arr.shape
    with open(path, "wb") as fh:
        fh.write(MAGIC + f" {rows} {cols}\n".encode("ascii"))
        fh.write(arr.astype("<f8", copy=False).tobytes(order="C"))


def read_rgrid(path) -> np.ndarray:
    """Read an RGRID v1 file, returning a (rows, cols) float64 array."""
    with open(path, "rb") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 4 or parts[0] + b" " + parts[1] != MAGIC:
            raise ValueError(f"{path}: not an RGRID v1 file (header {header!r})")
        try:
            rows, cols = int(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ValueError(f"{path}: bad RGRID dimensions in {header!r}") from exc
        if rows <= 0 or cols <= 0:
            raise ValueError(f"{path}: non-positive RGRID dimensions {rows}x{cols}")
        payload = fh.read(rows * cols * 8)
    if len(payload) != rows * cols * 8:
        raise ValueError(f"{path}: truncated RGRID payload")
    return np.frombuffer(payload, dtype="<f8").reshape(rows, cols).astype(np.float64)
