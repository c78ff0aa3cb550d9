"""Independent reference computations for the test suite.

Everything here deliberately avoids the code paths under test: eigenvalues
come from a hand-rolled cyclic Jacobi sweep rather than any library or
package routine, convolution from a four-deep index loop, and derivatives
from one-sided finite differences.
"""

import numpy as np


def jacobi_eigh(matrix, sweeps=100, tol=1e-14):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi
    rotations. Returns (values, vectors) sorted by descending eigenvalue."""
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.abs(a).max(), 1e-300)
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    order = np.argsort(np.diag(a))[::-1]
    return np.diag(a)[order], v[:, order]


def jacobi_singular_values(matrix):
    """Singular values via Jacobi on the (small) Gram matrix."""
    a = np.asarray(matrix, dtype=np.float64)
    vals, _ = jacobi_eigh(a.T @ a)
    return np.sqrt(np.clip(vals, 0.0, None))


def brute_force_periodic_conv(img, psf, center):
    """O(n^4) periodic convolution: out[t] = sum_s psf_offset(t - s) img[s],
    with psf entry (a, b) carrying the offset (a - cr, b - cc)."""
    rows, cols = img.shape
    prows, pcols = psf.shape
    cr, cc = center
    out = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            for a in range(prows):
                for b in range(pcols):
                    si = (i - (a - cr)) % rows
                    sj = (j - (b - cc)) % cols
                    acc += psf[a, b] * img[si, sj]
            out[i, j] = acc
    return out


def finite_difference_derivative(F, x, v, h=1e-6):
    """(F(x + h v) - F(x)) / h, the one-sided directional derivative."""
    return (F.forward(x + h * v) - F.forward(x)) / h


def landweber_closed_form(singular_values, x_true, beta, k):
    """Componentwise geometric recursion for diagonal Landweber from 0:
    x_k[i] = x_true[i] * (1 - (1 - beta * s_i^2)^k)."""
    s = np.asarray(singular_values, dtype=np.float64)
    ratios = (1.0 - beta * s * s) ** k
    return np.asarray(x_true) * (1.0 - ratios)


def min_residual_over(columns, target):
    """Least-squares minimum of ||target - columns z|| (dense oracle)."""
    z, *_ = np.linalg.lstsq(columns, target, rcond=None)
    return float(np.linalg.norm(target - columns @ z))
