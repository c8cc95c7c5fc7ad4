"""Objective oracles, structural descriptors, and norm conversions."""

import numpy as np
import pytest

from ucfw import (
    HEBDescriptor,
    InvalidParams,
    L1Ball,
    LpBall,
    QuadraticObjective,
    dual_floor_factor,
    grad_floor_quadratic,
    heb_from_uniform_convexity,
    lp_norm,
    lp_smoothness_from_l2,
    objective_from_json,
)
from ucfw.errors import ConfigError
from ucfw.geometry import dual_exponent
from ucfw.objectives import quadratic_from_descriptor


class TestHeb:
    def test_strongly_convex_base_case(self):
        heb = heb_from_uniform_convexity(2.0, 2.0)
        assert (heb.mu_heb, heb.theta) == (1.0, 0.5)

    def test_small_modulus(self):
        heb = heb_from_uniform_convexity(0.5, 2.0)
        assert heb.mu_heb == pytest.approx(2.0)

    def test_quartic(self):
        heb = heb_from_uniform_convexity(2.0, 4.0)
        assert (heb.mu_heb, heb.theta) == (1.0, 0.25)

    def test_invalid(self):
        with pytest.raises(InvalidParams):
            HEBDescriptor(mu_heb=1.0, theta=0.7)
        with pytest.raises(InvalidParams):
            heb_from_uniform_convexity(0.0, 2.0)

    def test_sampled_points_satisfy_bound(self):
        # ||x - x*|| <= mu_heb h(x)^theta for an unconstrained quadratic
        f = QuadraticObjective(A=2.0 * np.ones(4), x0=np.zeros(4))
        heb = f.heb
        rng = np.random.default_rng(5)
        X = rng.standard_normal((200, 4))
        for x in X:
            h = f.value(x)
            assert np.linalg.norm(x) <= heb.mu_heb * h**heb.theta + 1e-9


class TestQuadratic:
    def test_eigen_summary(self):
        f = QuadraticObjective(A=np.array([1.0, 4.0, 100.0]), x0=np.zeros(3))
        assert (f.L, f.mu_sc, f.condition_number) == (100.0, 1.0, 100.0)

    def test_full_matrix(self):
        A = np.array([[2.0, 1.0], [1.0, 2.0]])
        f = QuadraticObjective(A=A, x0=np.zeros(2))
        assert f.L == pytest.approx(3.0)
        assert f.mu_sc == pytest.approx(1.0)

    def test_rejects_indefinite(self):
        with pytest.raises(InvalidParams):
            QuadraticObjective(A=np.array([[1.0, 2.0], [2.0, 1.0]]), x0=np.zeros(2))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(9)
        A = rng.standard_normal((5, 5))
        A = A @ A.T + 5.0 * np.eye(5)
        f = QuadraticObjective(A=A, x0=rng.standard_normal(5))
        eps = 1e-6
        for x in rng.standard_normal((100, 5)):
            g = f.gradient(x)
            for i in range(5):
                e = np.zeros(5)
                e[i] = eps
                fd = (f.value(x + e) - f.value(x - e)) / (2 * eps)
                assert fd == pytest.approx(g[i], rel=1e-5, abs=1e-7)

    def test_smoothness_constant(self):
        f = QuadraticObjective(A=np.array([1.0, 3.0]), x0=np.zeros(2))
        rng = np.random.default_rng(2)
        for _ in range(100):
            x, y = rng.standard_normal(2), rng.standard_normal(2)
            lhs = np.linalg.norm(f.gradient(x) - f.gradient(y))
            assert lhs <= f.L * np.linalg.norm(x - y) + 1e-12


class TestNormConversion:
    def test_l2_identity(self):
        assert lp_smoothness_from_l2(3.0, 10, 2.0) == 3.0

    def test_p_above_two(self):
        # ||.||_p <= ||.||_2 and ||.||_{p*} dual pairing lose d^{1-2/p}
        assert lp_smoothness_from_l2(1.0, 16, 4.0) == pytest.approx(16.0 ** 0.5)

    def test_conversion_is_valid_smoothness(self):
        rng = np.random.default_rng(4)
        d, p = 6, 3.0
        f = QuadraticObjective(A=np.linspace(1, 2, d), x0=np.zeros(d))
        Lp = lp_smoothness_from_l2(f.L, d, p)
        for _ in range(200):
            x, y = rng.standard_normal(d), rng.standard_normal(d)
            lhs = lp_norm(f.gradient(x) - f.gradient(y), dual_exponent(p))
            assert lhs <= Lp * lp_norm(x - y, p) + 1e-12

    def test_dual_floor_factor(self):
        rng = np.random.default_rng(6)
        d, p = 8, 3.0
        factor = dual_floor_factor(d, p)
        for g in rng.standard_normal((200, d)):
            assert lp_norm(g, dual_exponent(p)) >= factor * np.linalg.norm(g) - 1e-12


class TestGradFloor:
    def test_identity_far_center(self):
        f = QuadraticObjective(A=np.ones(2), x0=np.array([10.0, 0.0]))
        ball = LpBall(p=2.0, radius=5.0, dim=2)
        assert grad_floor_quadratic(f, ball) == pytest.approx(5.0)

    def test_feasible_center_gives_zero(self):
        f = QuadraticObjective(A=np.ones(2), x0=np.array([1.0, 0.0]))
        assert grad_floor_quadratic(f, LpBall(p=2.0, radius=5.0, dim=2)) == 0.0

    def test_anisotropic_lower_bound_vs_sampling(self):
        f = QuadraticObjective(A=np.array([1.0, 100.0]), x0=np.array([10.0, 0.0]))
        ball = LpBall(p=2.0, radius=5.0, dim=2)
        c = grad_floor_quadratic(f, ball)
        assert c == pytest.approx(5.0)
        rng = np.random.default_rng(8)
        dirs = rng.standard_normal((10**5, 2))
        pts = 5.0 * dirs / np.linalg.norm(dirs, axis=1)[:, None]
        pts *= rng.random(10**5)[:, None] ** 0.5
        grads = (pts - f.x0) * np.array([1.0, 100.0])
        assert np.linalg.norm(grads, axis=1).min() >= c - 1e-9

    def test_l1_ball_uses_dual_sup_norm(self):
        f = QuadraticObjective(A=np.ones(2), x0=np.array([4.0, 4.0]))
        ball = L1Ball(radius=1.0, dim=2)
        c = grad_floor_quadratic(f, ball)
        assert c > 0.0
        # floor must hold for the actual dual (sup) norm on sampled points
        rng = np.random.default_rng(10)
        pts = rng.uniform(-1, 1, (2000, 2))
        pts = pts[np.abs(pts).sum(axis=1) <= 1.0]
        sup = np.abs(pts - f.x0).max(axis=1)
        assert sup.min() >= c - 1e-9


class TestDescriptors:
    def test_quadratic_from_descriptor_cond(self):
        f = quadratic_from_descriptor(dim=10, cond=100.0, x0_direction="ones", x0_scale=3.0)
        assert f.condition_number == pytest.approx(100.0)
        assert np.linalg.norm(f.x0) == pytest.approx(3.0)

    def test_descriptor_is_reproducible(self):
        a = quadratic_from_descriptor(dim=6, cond=10.0, x0_direction="e1", x0_scale=2.0)
        b = quadratic_from_descriptor(dim=6, cond=10.0, x0_direction="e1", x0_scale=2.0)
        np.testing.assert_array_equal(a.A, b.A)
        np.testing.assert_array_equal(a.x0, b.x0)

    def test_json_round_trip(self):
        f = objective_from_json(
            {"family": "quadratic", "dim": 4, "cond": 7.0, "x0_direction": "ones", "x0_scale": 1.0}
        )
        assert f.condition_number == pytest.approx(7.0)

    def test_bad_direction(self):
        with pytest.raises(ConfigError):
            quadratic_from_descriptor(dim=4, cond=2.0, x0_direction="diag", x0_scale=1.0)
