from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from qubofolio.errors import ConfigError
from qubofolio.portfolio import PortfolioSpec, continuous_objective
from qubofolio.solvers.gradient import GradientConfig, hessian, project_to_simplex, projected_gradient


class TestProjection:
    def test_known_cases(self):
        assert project_to_simplex([0.2, 0.3, 0.5]).tolist() == pytest.approx([0.2, 0.3, 0.5])
        assert project_to_simplex([2.0, 0.0]).tolist() == [1.0, 0.0]
        assert project_to_simplex([0.0, 0.0]).tolist() == [0.5, 0.5]

    @settings(max_examples=200, deadline=None)
    @given(hnp.arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 9)), elements=st.floats(-5, 5)))
    def test_on_simplex(self, V):
        W = project_to_simplex(V)
        assert np.all(W >= 0)
        assert np.allclose(W.sum(axis=1), 1.0, atol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(hnp.arrays(np.float64, 5, elements=st.floats(-3, 3)))
    def test_is_closest_point(self, v):
        w = project_to_simplex(v)
        # optimality: (v - w) . (u - w) <= 0 for every simplex vertex u
        for k in range(5):
            u = np.zeros(5)
            u[k] = 1.0
            assert (v - w) @ (u - w) <= 1e-9


class TestSolver:
    def test_config(self):
        with pytest.raises(ConfigError):
            GradientConfig(step_size=0.0)
        with pytest.raises(ConfigError):
            GradientConfig(restarts=0)

    def test_symmetric_problem_gives_equal_weights(self):
        n, T = 4, 2
        spec = PortfolioSpec(returns=np.zeros((T, n)), covariances=np.array([np.eye(n)] * T),
                             unit_costs=np.zeros((T, n)), risk_aversion=3.0)
        r = projected_gradient(spec)
        assert np.allclose(r.weights, 1 / n, atol=1e-8)

    def test_hessian_matches_quadratic(self, testing_spec):
        H = hessian(testing_spec)
        rng = np.random.default_rng(0)
        w, d = rng.random(9), rng.random(9)
        f = lambda x: continuous_objective(x, testing_spec, include_penalty=False)  # noqa: E731
        second = f(w + d) - 2 * f(w) + f(w - d)
        assert second == pytest.approx(d @ H @ d, rel=1e-8)

    def test_toy(self, toy_spec):
        r = projected_gradient(toy_spec)
        assert r.converged
        assert r.weights[0] * 100 == pytest.approx([31.1, 54.7, 14.2], abs=2.0)
        assert r.objective == pytest.approx(0.08835, abs=1e-4)

    def test_testing_objective(self, testing_spec):
        r = projected_gradient(testing_spec)
        assert r.objective == pytest.approx(0.0177096, abs=1e-6)
        assert r.objective_with_penalty == pytest.approx(r.objective, abs=1e-12)

    def test_non_convergence_flagged(self, testing_spec):
        r = projected_gradient(testing_spec, GradientConfig(max_iterations=2, restarts=1))
        assert not r.converged
        assert np.allclose(r.weights.sum(axis=1), 1.0, atol=1e-12)

    def test_trace_non_increasing(self, practical_spec):
        r = projected_gradient(practical_spec, GradientConfig(restarts=2))
        assert all(a >= b for a, b in zip(r.trace, r.trace[1:]))
