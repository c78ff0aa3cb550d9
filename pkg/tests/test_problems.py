import numpy as np
import pytest

from deflact import (SolveConfig, landweber, load_problem,
                     make_blur_problem, make_diagonal_problem,
                     make_nonlinear_toy, save_problem, semiconvergence_index,
                     steepest_descent, top_eigenvectors)
from deflact.errors import ConfigError
from deflact.nonlinear import gradient_descent
from deflact.problems import geometric_image, starfield_image

from conftest import quick_cfg


class TestBlurProblem:
    def test_zero_noise_gives_exact_data(self):
        p = make_blur_problem(8, 8, 1.0, "geometric", 0.0, seed=1)
        np.testing.assert_array_equal(p.y_delta, p.y_exact)
        assert p.delta == 0.0

    def test_starfield_regeneration_is_bit_identical(self):
        a = make_blur_problem(32, 32, 2.0, "starfield", 1e-2, seed=7)
        b = make_blur_problem(32, 32, 2.0, "starfield", 1e-2, seed=7)
        assert a.y_delta.tobytes() == b.y_delta.tobytes()
        assert a.x_true.tobytes() == b.x_true.tobytes()

    def test_noise_norm_matches_request(self):
        p = make_blur_problem(16, 16, 2.0, "geometric", 5e-2, seed=3)
        target = 5e-2 * np.linalg.norm(p.y_exact)
        got = np.linalg.norm(p.y_delta - p.y_exact)
        assert abs(got - target) <= 1e-12 * target
        assert p.delta == pytest.approx(target)

    def test_forward_consistency(self):
        p = make_blur_problem(12, 12, 1.5, "starfield", 1e-2, seed=4)
        gap = np.linalg.norm(p.op.apply(p.x_true) - p.y_exact)
        assert gap <= 1e-10 * np.linalg.norm(p.y_exact)

    def test_heavy_blur_spectrum_spans_four_decades(self):
        # ill-posedness smoke check via 20-step subspace-iteration Ritz
        # values; the heavy-blur operator has ~200 eigenvalues above
        # 1e-4 * lambda_max, so the block must be large enough to reach
        # the 4th decade
        p = make_blur_problem(32, 32, 6.0, "geometric", 0.0, seed=5)
        op = p.op
        rng = np.random.default_rng(6)
        block = 220
        z, _ = np.linalg.qr(rng.standard_normal((op.dim_domain, block)))
        for _ in range(20):
            z = np.stack([op.apply(z[:, i]) for i in range(block)], axis=1)
            z, _ = np.linalg.qr(z)
        az = np.stack([op.apply(z[:, i]) for i in range(block)], axis=1)
        h = 0.5 * ((z.T @ az) + (z.T @ az).T)
        ritz = np.abs(np.linalg.eigvalsh(h))
        assert ritz.max() / ritz.min() >= 1e4

    def test_unreadable_file_image_rejected(self):
        with pytest.raises(ConfigError, match="cannot read"):
            make_blur_problem(8, 8, 1.0, "file:/nonexistent/img.rg", 0.0, 0)

    def test_geometric_image_definition(self):
        img = geometric_image(16, 16)
        band = 2  # min(16,16)//8
        assert img[0, 0] == 1.0            # ring 0
        assert img[band, band] == 0.0      # ring 1
        assert img[2 * band, 2 * band] == 1.0
        assert set(np.unique(img)) == {0.0, 1.0}

    def test_starfield_brightness_range(self):
        img = starfield_image(32, 32, seed=8)
        bright = img[img > 0]
        assert bright.size == max(5, 1024 // 128)
        assert bright.min() >= 1.0 and bright.max() <= 1e3


class TestDiagonalProblem:
    def test_diag2_fixture(self):
        p = make_diagonal_problem([2.0, 1.0], [1.0, 1.0], 0.0, seed=0)
        np.testing.assert_array_equal(p.y_delta, [2.0, 1.0])

    def test_noise_norm_exact(self):
        p = make_diagonal_problem(np.linspace(1, 2, 6), np.ones(6),
                                  delta=1e-3, seed=2)
        got = np.linalg.norm(p.y_delta - p.y_exact)
        assert abs(got - 1e-3) <= 1e-15

    def test_semiconvergence_at_finite_index(self):
        # the componentwise closed form locates the error minimum near
        # k = 82e3 (value 0.657) before noise amplification lifts the
        # error back toward its 3.29 floor; run past it and inspect
        sv = 2.0 ** -np.arange(10)
        p = make_diagonal_problem(sv, np.ones(10), delta=1e-2, seed=3)
        cfg = SolveConfig(beta=1.0, delta=0.0, max_iters=130000,
                          record_error=True)
        res = landweber(p.op, p.y_delta, np.zeros(10), cfg, x_true=p.x_true)
        idx = semiconvergence_index(res.trace)
        assert idx is not None
        assert 0 < idx < res.trace.final.iter
        assert 50000 < idx < 120000
        assert res.trace[idx].error_norm == pytest.approx(0.6572, abs=2e-3)
        assert res.trace.final.error_norm > res.trace[idx].error_norm


class TestNonlinearToy:
    def test_epsilon_zero_reduces_to_linear(self):
        p = make_nonlinear_toy(5, epsilon=0.0, delta=0.0, seed=4)
        cfg = quick_cfg(max_iters=20, keep_iterates=True)
        nl = gradient_descent(p.op, p.y_delta, np.zeros(5), cfg)
        lin = steepest_descent(p.op.op, p.y_delta, np.zeros(5), cfg)
        for a, b in zip(nl.iterates, lin.iterates):
            assert np.linalg.norm(a - b) <= 1e-10

    def test_derivative_passes_finite_difference_at_truth(self):
        from oracles import finite_difference_derivative
        p = make_nonlinear_toy(5, epsilon=0.01, delta=0.0, seed=5)
        rng = np.random.default_rng(6)
        v = rng.standard_normal(5)
        fd = finite_difference_derivative(p.op, p.x_true, v, h=1e-7)
        an = p.op.derivative_forward(p.x_true, v)
        assert np.linalg.norm(fd - an) <= 1e-5

    def test_gradient_descent_recovers_truth_noise_free(self):
        p = make_nonlinear_toy(4, epsilon=0.01, delta=0.0, seed=7)
        res = gradient_descent(p.op, p.y_delta, np.zeros(4),
                               quick_cfg(max_iters=5000))
        assert np.linalg.norm(res.x - p.x_true) <= 1e-4


class TestDeterminismAndValidation:
    def test_generators_bit_deterministic(self):
        for build in (
            lambda: make_blur_problem(8, 8, 1.0, "geometric", 1e-2, seed=9),
            lambda: make_diagonal_problem([2.0, 1.0], [1.0, 1.0], 1e-3, 9),
            lambda: make_nonlinear_toy(4, 0.01, 1e-3, seed=9),
        ):
            a, b = build(), build()
            assert a.y_delta.tobytes() == b.y_delta.tobytes()

    def test_declared_delta_enforced(self):
        from deflact.problems import TestProblem
        from deflact import DiagonalOperator
        op = DiagonalOperator([1.0, 1.0])
        with pytest.raises(ValueError, match="exceeds declared delta"):
            TestProblem(op, np.array([1.0, 1.0]), 0.0, "bad",
                        y_exact=np.array([0.0, 0.0]))


class TestSerialization:
    def test_blur_roundtrip(self, tmp_path):
        p = make_blur_problem(8, 8, 1.2, "starfield", 1e-2, seed=10)
        save_problem(p, tmp_path / "p")
        back = load_problem(tmp_path / "p")
        np.testing.assert_array_equal(back.y_delta, p.y_delta)
        np.testing.assert_array_equal(back.x_true, p.x_true)
        assert back.delta == p.delta
        rng = np.random.default_rng(11)
        x = rng.standard_normal(64)
        np.testing.assert_array_equal(back.op.apply(x), p.op.apply(x))

    def test_diagonal_roundtrip(self, tmp_path):
        p = make_diagonal_problem([3.0, 2.0, 1.0], [1.0, -1.0, 2.0],
                                  1e-3, seed=12)
        save_problem(p, tmp_path / "p")
        back = load_problem(tmp_path / "p")
        np.testing.assert_array_equal(back.op.diag, p.op.diag)
        np.testing.assert_array_equal(back.y_delta, p.y_delta)

    def test_nltoy_roundtrip(self, tmp_path):
        p = make_nonlinear_toy(4, 0.02, 1e-3, seed=13)
        save_problem(p, tmp_path / "p")
        back = load_problem(tmp_path / "p")
        rng = np.random.default_rng(14)
        x = rng.standard_normal(4)
        np.testing.assert_array_equal(back.op.forward(x), p.op.forward(x))
        assert back.op.epsilon == p.op.epsilon
