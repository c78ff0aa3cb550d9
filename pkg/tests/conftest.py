import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from deflact import (DenseOperator, DiagonalOperator, KTuple, SolveConfig,
                     build_recycle_space, make_blur_problem)


@pytest.fixture
def diag2():
    """The canonical 2x2 fixture T = diag(2, 1)."""
    return DiagonalOperator([2.0, 1.0])


@pytest.fixture
def diag2_space(diag2):
    """Recycle space from U_raw = {e1} on the DIAG2 fixture."""
    return build_recycle_space(diag2, KTuple(np.array([[1.0], [0.0]])))


def random_dense(n, m=None, seed=0, spectrum=None):
    """Seeded dense operator, optionally with prescribed singular values."""
    rng = np.random.default_rng(seed)
    m = n if m is None else m
    if spectrum is None:
        return DenseOperator(rng.standard_normal((m, n)))
    q1, _ = np.linalg.qr(rng.standard_normal((m, m)))
    q2, _ = np.linalg.qr(rng.standard_normal((n, n)))
    k = min(m, n)
    d = np.zeros((m, n))
    d[:k, :k] = np.diag(spectrum[:k])
    return DenseOperator(q1 @ d @ q2.T)


@pytest.fixture(scope="session")
def blur32():
    """Noisy 32x32 Gaussian blur fixture shared across tests."""
    return make_blur_problem(32, 32, sigma=3.0, image="geometric",
                             delta_rel=5e-2, seed=11)


def quick_cfg(**kw):
    defaults = dict(delta=0.0, max_iters=200, record_error=False)
    defaults.update(kw)
    return SolveConfig(**defaults)
