"""The Frank-Wolfe loop: step rules, trace invariants, serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucfw import (
    InfeasibleStart,
    L1Ball,
    LpBall,
    QuadraticObjective,
    StepRule,
    exact_line_search,
    grad_floor_quadratic,
    reference_optimum,
    run_fw,
    short_step,
)
from ucfw.experiments import fit_loglog_slope, problem_constants, x_init_for


class TestShortStep:
    def test_converged(self):
        assert short_step(0.0, 1.0, 1.0) == 0.0

    def test_clipped(self):
        assert short_step(2.0, 1.0, 1.0) == 1.0

    def test_interior(self):
        assert short_step(0.5, 2.0, 1.0) == 0.25

    def test_degenerate_direction(self):
        assert short_step(0.5, 1.0, 0.0) == 1.0

    @given(
        gap=st.floats(0.0, 1e6),
        L=st.floats(1e-6, 1e6),
        dsq=st.floats(0.0, 1e6),
    )
    @settings(max_examples=200, deadline=None)
    def test_always_in_unit_interval(self, gap, L, dsq):
        assert 0.0 <= short_step(gap, L, dsq) <= 1.0


class TestExactLineSearch:
    def test_clamped_to_one(self):
        f = QuadraticObjective(A=np.ones(2), x0=np.array([2.0, 0.0]))
        assert exact_line_search(f, np.zeros(2), np.array([1.0, 0.0])) == 1.0

    def test_zero_direction(self):
        f = QuadraticObjective(A=np.ones(2), x0=np.array([2.0, 0.0]))
        assert exact_line_search(f, np.zeros(2), np.zeros(2)) == 0.0

    def test_interior_minimizer(self):
        f = QuadraticObjective(A=np.ones(2), x0=np.array([0.5, 0.0]))
        assert exact_line_search(f, np.zeros(2), np.array([1.0, 0.0])) == pytest.approx(0.5)

    def test_matches_numeric_search_for_nonquadratic(self):
        class Quartic:
            L = 12.0
            mu_sc = None
            heb = None
            grad_floor = None

            def value(self, x):
                return float(np.sum(x**4) + np.sum((x - 1.0) ** 2))

            def gradient(self, x):
                return 4.0 * x**3 + 2.0 * (x - 1.0)

        f = Quartic()
        x = np.zeros(2)
        d = np.array([1.0, 0.5])
        gamma = exact_line_search(f, x, d)
        # returned point must beat the endpoints and the short step
        for other in (0.0, 1.0, short_step(-np.dot(f.gradient(x), d), f.L, np.dot(d, d))):
            assert f.value(x + gamma * d) <= f.value(x + other * d) + 1e-12

    def test_analytic_matches_numeric_on_quadratic(self):
        from scipy.optimize import minimize_scalar

        rng = np.random.default_rng(12)
        f = QuadraticObjective(A=np.array([1.0, 5.0, 0.3]), x0=rng.standard_normal(3))
        for _ in range(20):
            x, d = rng.standard_normal(3), rng.standard_normal(3)
            gamma = exact_line_search(f, x, d)
            res = minimize_scalar(
                lambda g: f.value(x + g * d), bounds=(0.0, 1.0), method="bounded",
                options={"xatol": 1e-12},
            )
            # bounded Brent stops short of the interval endpoints
            assert gamma == pytest.approx(float(np.clip(res.x, 0, 1)), abs=1e-6)


def _projection_problem():
    ball = LpBall(p=2.0, radius=1.0, dim=2)
    f = QuadraticObjective(A=np.ones(2), x0=np.array([2.0, 0.0]))
    return ball, f


class TestRunFw:
    def test_start_at_interior_optimum(self):
        ball = LpBall(p=2.0, radius=5.0, dim=2)
        f = QuadraticObjective(A=np.ones(2), x0=np.array([1.0, 0.0]))
        trace = run_fw(ball, f, np.array([1.0, 0.0]), StepRule.short(), 50)
        assert len(trace) == 1
        assert trace.fw_gap[0] == 0.0

    def test_projection_onto_disk(self):
        ball, f = _projection_problem()
        trace = run_fw(
            ball, f, np.array([0.0, 1.0]), StepRule.short(), 200,
            x_star=np.array([1.0, 0.0]), f_star=0.5,
        )
        assert trace.primal_gap[-1] <= 1e-6
        assert np.linalg.norm(trace.iterates[-1] - [1.0, 0.0]) <= 1e-3

    def test_deterministic_rule_sublinear_on_disk(self):
        ball = LpBall(p=2.0, radius=1.0, dim=2)
        f = QuadraticObjective(A=np.ones(2), x0=np.array([2.0, 0.5]))
        trace = run_fw(ball, f, np.array([0.0, 1.0]), StepRule.deterministic(), 500)
        slope = fit_loglog_slope(trace.t, trace.min_fw_gap, 5, 500)
        assert -1.4 <= slope <= -0.6

    def test_infeasible_start(self):
        ball, f = _projection_problem()
        with pytest.raises(InfeasibleStart):
            run_fw(ball, f, np.array([2.0, 2.0]), StepRule.short(), 10)

    def test_gap_dominates_primal_gap(self):
        ball, f = _projection_problem()
        trace = run_fw(
            ball, f, np.array([0.0, 1.0]), StepRule.short(), 200,
            x_star=np.array([1.0, 0.0]), f_star=0.5,
        )
        assert np.all(trace.fw_gap + 1e-12 >= trace.primal_gap)

    def test_iterates_feasible_and_updates_convex(self):
        ball = LpBall(p=3.0, radius=1.0, dim=5)
        f = QuadraticObjective(A=np.linspace(1, 3, 5), x0=np.ones(5))
        trace = run_fw(ball, f, x_init_for(ball, 0), StepRule.exact(), 100)
        assert ball.batch_membership_excess(trace.iterates).max() <= 1e-9
        for i in range(len(trace) - 1):
            g = trace.gamma[i]
            expect = (1 - g) * trace.iterates[i] + g * trace.vertices[i]
            np.testing.assert_allclose(trace.iterates[i + 1], expect, atol=1e-14)

    def test_monotone_descent_and_per_step_decrease(self):
        ball = LpBall(p=3.0, radius=1.0, dim=8)
        f = QuadraticObjective(A=np.ones(8), x0=np.ones(8))
        trace = run_fw(ball, f, x_init_for(ball, 1), StepRule.short(), 300,
                       x_star=None, f_star=None)
        vals = np.array([f.value(x) for x in trace.iterates])
        assert np.all(np.diff(vals) <= 1e-12)
        for i in range(len(trace) - 1):
            g = trace.fw_gap[i]
            d = trace.vertices[i] - trace.iterates[i]
            dec = 0.5 * g * min(1.0, g / (f.L * float(np.dot(d, d)))) if np.any(d) else 0.0
            assert vals[i + 1] <= vals[i] - dec + 1e-12

    def test_distance_to_optimum_diagnostic(self):
        # ||x_t - x*||^q <= (2/(c alpha)) h_t on a gradient-floor problem
        ball = LpBall(p=3.0, radius=1.0, dim=8)
        f = QuadraticObjective(A=np.ones(8), x0=np.ones(8) * (3.0 / np.sqrt(8)))
        consts = problem_constants(ball, f)
        assert consts["c"] > 0.0
        x_init = x_init_for(ball, 0)
        x_star, f_star = reference_optimum(ball, f, x_init, 50_000, stop_gap=1e-15)
        trace = run_fw(ball, f, x_init, StepRule.short(), 2000,
                       x_star=x_star, f_star=f_star)
        lhs = np.array([ball.norm(x - x_star) for x in trace.iterates]) ** consts["q"]
        rhs = (2.0 / (consts["c"] * consts["alpha"])) * trace.primal_gap
        assert np.all(lhs <= rhs + 1e-6)


class TestTraceSerialization:
    def test_csv_byte_stable(self, tmp_path):
        ball, f = _projection_problem()
        trace = run_fw(ball, f, np.array([0.0, 1.0]), StepRule.short(), 50)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        trace.to_csv(a)
        trace.to_csv(b)
        assert a.read_bytes() == b.read_bytes()
        header = a.read_text().splitlines()[0]
        assert header == "t,gamma,fw_gap,min_fw_gap,primal_gap,dist_to_vertex,grad_dual_norm"

    def test_identical_runs_bitwise(self):
        ball = LpBall(p=3.0, radius=1.0, dim=6)
        f = QuadraticObjective(A=np.linspace(1, 2, 6), x0=np.ones(6))
        t1 = run_fw(ball, f, x_init_for(ball, 3), StepRule.short(), 100)
        t2 = run_fw(ball, f, x_init_for(ball, 3), StepRule.short(), 100)
        np.testing.assert_array_equal(t1.iterates, t2.iterates)

    def test_sidecar(self, tmp_path):
        ball, f = _projection_problem()
        trace = run_fw(ball, f, np.array([0.0, 1.0]), StepRule.exact(), 10)
        trace.write_sidecar(tmp_path / "m.json")
        import json

        meta = json.loads((tmp_path / "m.json").read_text())
        assert meta["step_rule"] == "exact"
        assert meta["set"]["family"] == "lp"


class TestReferenceOptimum:
    def test_matches_analytic_projection(self):
        ball, f = _projection_problem()
        x_star, f_star = reference_optimum(ball, f, np.array([0.0, 1.0]), 10_000)
        assert np.linalg.norm(x_star - [1.0, 0.0]) <= 1e-5
        assert f_star == pytest.approx(0.5, abs=1e-9)
