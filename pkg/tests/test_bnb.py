from __future__ import annotations

import itertools

import numpy as np
import pytest

from qubofolio.errors import ConfigError
from qubofolio.portfolio import decode_weights
from qubofolio.qubo import QuboProblem, all_objectives, brute_force, evaluate
from qubofolio.solvers.annealing import AnnealConfig
from qubofolio.solvers.bnb import BnbConfig, branch_and_bound, subcube_lower_bound, variable_order

from conftest import random_problem

# a deliberately weak incumbent so that the tree search does the work
WEAK = AnnealConfig(temperature_decrement=0.5, iterations_per_temperature=1)


class TestConfig:
    def test_invalid(self):
        with pytest.raises(ConfigError):
            BnbConfig(node_limit=0)
        with pytest.raises(ConfigError):
            BnbConfig(memory_limit=0)
        with pytest.raises(ConfigError):
            BnbConfig(variable_order="random")

    def test_order(self):
        p = QuboProblem(np.diag([0.0, 4.0, 3.0]), [1.0, 0.0, 0.0])
        assert variable_order(p).tolist() == [1, 2, 0]
        assert variable_order(p, "given").tolist() == [0, 1, 2]


class TestBound:
    def test_valid_on_every_subcube(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 9))
            p = random_problem(rng, n)
            f = all_objectives(p)
            X = np.array(list(itertools.product([0, 1], repeat=n)))
            for _ in range(15):
                k = int(rng.integers(0, n + 1))
                idx = rng.choice(n, size=k, replace=False)
                fixed = {int(i): int(rng.integers(0, 2)) for i in idx}
                mask = np.all([X[:, i] == v for i, v in fixed.items()], axis=0) if fixed else np.ones(len(X), bool)
                assert subcube_lower_bound(p, fixed) <= f[mask].min() + 1e-12

    def test_exact_when_all_fixed(self, rng):
        p = random_problem(rng, 5)
        x = [1, 0, 1, 1, 0]
        assert subcube_lower_bound(p, dict(enumerate(x))) == pytest.approx(evaluate(p, x), abs=1e-12)


class TestSearch:
    def test_matches_brute_force(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 13))
            p = random_problem(rng, n)
            for order in ("given", "descending-impact"):
                r = branch_and_bound(p, BnbConfig(variable_order=order, incumbent=WEAK))
                assert r.info["optimal"]
                assert r.objective == pytest.approx(brute_force(p).objective, abs=1e-9)

    def test_diagonal_problem_node_count(self, rng):
        for n in (5, 12, 20):
            p = QuboProblem(np.diag(rng.normal(size=n)), rng.normal(size=n))
            r = branch_and_bound(p, BnbConfig(incumbent=WEAK))
            assert r.info["nodes"] <= 2 * n + 1
            assert r.objective == pytest.approx(brute_force(p).objective, abs=1e-12)

    def test_node_limit_returns_incumbent(self, rng):
        p = random_problem(rng, 14)
        r = branch_and_bound(p, BnbConfig(node_limit=5, incumbent=WEAK))
        assert not r.info["optimal"] and r.info["limit"] == "node_limit"
        assert r.objective == evaluate(p, r.bits)

    def test_memory_limit(self, rng):
        p = random_problem(rng, 14)
        r = branch_and_bound(p, BnbConfig(memory_limit=10, incumbent=WEAK))
        assert not r.info["optimal"] and r.info["limit"] == "memory_limit"

    def test_toy_weights(self, toy_problem, toy_spec):
        r = branch_and_bound(toy_problem)
        assert r.info["optimal"]
        assert decode_weights(r.bits, toy_spec).tolist() == [[0.375, 0.5, 0.125]]

    def test_deterministic(self, rng):
        p = random_problem(rng, 10)
        a, b = branch_and_bound(p), branch_and_bound(p)
        assert np.array_equal(a.bits, b.bits) and a.info["nodes"] == b.info["nodes"]
