"""Backend parity: the numba kernel and the numpy fallback must agree."""

import numpy as np
import pytest

from deflact import _kernels
from deflact import gaussian_psf, psf_operator


def _maps(rows, cols, seed):
    rng = np.random.default_rng(seed)
    k = 9
    dr = rng.integers(-3, 4, k)
    dc = rng.integers(-3, 4, k)
    row_map = (np.arange(rows)[None, :] - dr[:, None]) % rows
    col_map = (np.arange(cols)[None, :] - dc[:, None]) % cols
    weights = rng.random(k)
    return row_map.astype(np.int64), col_map.astype(np.int64), weights


def test_numpy_matches_numba_bitwise():
    if "numba" not in _kernels.available_backends():
        pytest.skip("numba unavailable")
    rng = np.random.default_rng(1)
    img = rng.standard_normal((12, 10))
    row_map, col_map, weights = _maps(12, 10, 2)
    a = _kernels.conv2d_periodic(img, row_map, col_map, weights, backend="numba")
    b = _kernels.conv2d_periodic(img, row_map, col_map, weights, backend="numpy")
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-15)


def test_operator_same_result_under_both_backends():
    if "numba" not in _kernels.available_backends():
        pytest.skip("numba unavailable")
    op = psf_operator(gaussian_psf(8, 8, 1.3), 8, 8)
    rng = np.random.default_rng(5)
    x = rng.standard_normal(64)
    img = x.reshape(8, 8)
    fwd_nb = _kernels.conv2d_periodic(img, op._fwd_rows, op._fwd_cols,
                                      op.weights, backend="numba")
    fwd_np = _kernels.conv2d_periodic(img, op._fwd_rows, op._fwd_cols,
                                      op.weights, backend="numpy")
    np.testing.assert_allclose(fwd_nb, fwd_np, rtol=0, atol=1e-15)


def test_unknown_backend_rejected():
    img = np.zeros((2, 2))
    maps = np.zeros((1, 2), dtype=np.int64)
    with pytest.raises(ValueError, match="unknown backend"):
        _kernels.conv2d_periodic(img, maps, maps, np.ones(1), backend="cuda")


def test_active_backend_is_available():
    assert _kernels.active_backend() in _kernels.available_backends()
