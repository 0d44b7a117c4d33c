"""Depth-first branch and bound for QUBO.

At a node with a set of fixed variables the objective splits into

    const + sum_{free i} l_i x_i + sum_{free i < j} a_ij x_i x_j

where ``l_i = b_i + a_ii / 2 + sum_{fixed j} a_ij x_j``.  Each remaining term
is bounded below by its own minimum over the free bits, giving

    bound = const + sum_i min(0, l_i) + sum_{i<j} min(0, a_ij).

A node is pruned when its bound is not below the incumbent.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConfigError
from ..qubo import QuboProblem, SolveResult
from .annealing import AnnealConfig, simulated_annealing

GIVEN = "given"
DESCENDING_IMPACT = "descending-impact"


@dataclass(frozen=True)
class BnbConfig:
    node_limit: int = 2_000_000
    memory_limit: int = 1 << 30
    variable_order: str = DESCENDING_IMPACT
    incumbent: AnnealConfig | None = field(default=None)
    seed: int = 0

    def __post_init__(self):
        if self.node_limit < 1 or self.memory_limit < 1:
            raise ConfigError("node_limit and memory_limit must be positive")
        if self.variable_order not in (GIVEN, DESCENDING_IMPACT):
            raise ConfigError(f"unknown variable_order {self.variable_order!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def variable_order(problem: QuboProblem, how: str = DESCENDING_IMPACT) -> np.ndarray:
    """Branching order; ``descending-impact`` sorts by total absolute coefficient mass."""
    if how == GIVEN:
        return np.arange(problem.dim)
    A = problem.quad
    mass = np.abs(A).sum(axis=1) - 0.5 * np.abs(np.diag(A)) + np.abs(problem.lin)
    return np.argsort(-mass, kind="stable")


def subcube_lower_bound(problem: QuboProblem, fixed: dict[int, int]) -> float:
    """Bound of the subcube where ``fixed`` variables take the given values."""
    A, b = problem.quad, problem.lin
    n = problem.dim
    F = np.array(sorted(fixed), dtype=np.int64)
    U = np.array([i for i in range(n) if i not in fixed], dtype=np.int64)
    xf = np.array([fixed[i] for i in F], dtype=np.float64)
    const = problem.offset
    if F.size:
        const += 0.5 * xf @ A[np.ix_(F, F)] @ xf + b[F] @ xf
    if U.size == 0:
        return float(const)
    lin = b[U] + 0.5 * np.diag(A)[U]
    if F.size:
        lin = lin + A[np.ix_(U, F)] @ xf
    pair = np.minimum(A[np.ix_(U, U)], 0.0)
    np.fill_diagonal(pair, 0.0)
    return float(const + np.minimum(lin, 0.0).sum() + 0.5 * pair.sum())


def _default_incumbent_config(problem: QuboProblem, seed: int) -> AnnealConfig:
    scale = float(np.abs(problem.quad).max(initial=0.0) + np.abs(problem.lin).max(initial=0.0)) or 1.0
    return AnnealConfig(
        initial_temperature=1.0,
        temperature_decrement=0.02,
        iterations_per_temperature=max(200, 20 * problem.dim),
        boltzmann_constant=scale,
        seed=seed,
    )


def branch_and_bound(problem: QuboProblem, config: BnbConfig | None = None) -> SolveResult:
    """Exact minimization within node and memory limits.

    ``info`` carries ``optimal`` (search finished within limits), ``nodes``
    (bounds computed, root included), ``pruned`` and ``limit`` (which limit
    stopped the search, if any).
    """
    config = config or BnbConfig()
    n = problem.dim
    A = np.ascontiguousarray(problem.quad)
    t0 = time.perf_counter()

    sa_cfg = config.incumbent or _default_incumbent_config(problem, config.seed)
    start = simulated_annealing(problem, sa_cfg)
    inc_val = start.objective
    inc_bits = start.bits.astype(np.int8).copy()
    evaluations = start.evaluations

    order = variable_order(problem, config.variable_order)
    neg = np.minimum(A, 0.0)
    np.fill_diagonal(neg, 0.0)
    lin0 = problem.lin + 0.5 * np.diag(A)

    nodes = 0
    pruned = 0
    peak_bytes = 0
    limit = None
    x = np.zeros(n, dtype=np.int8)
    free = np.ones(n, dtype=bool)

    # stack entries: (depth, value, parent const, parent lin, parent pair sum)
    # lin arrays are never modified in place, so siblings share them
    pair0 = 0.5 * neg.sum()
    root_bound = problem.offset + np.minimum(lin0, 0.0).sum() + pair0
    nodes += 1
    stack = []
    if root_bound < inc_val:
        v0 = order[0]
        first = 1 if lin0[v0] < 0 else 0
        stack.append((0, 1 - first, problem.offset, lin0, pair0))
        stack.append((0, first, problem.offset, lin0, pair0))
    else:
        pruned += 1

    entry_bytes = 8 * n + 64
    while stack:
        if nodes >= config.node_limit:
            limit = "node_limit"
            break
        peak_bytes = max(peak_bytes, len(stack) * entry_bytes)
        if peak_bytes > config.memory_limit:
            limit = "memory_limit"
            break
        depth, val, const, lin, pair_sum = stack.pop()
        v = order[depth]
        # restore the assignment along this path
        free[order[depth:]] = True
        free[order[:depth]] = False
        x[v] = val
        free[v] = False
        pair_sum = pair_sum - neg[v, free].sum()
        if val == 1:
            const = const + lin[v]
            lin = lin + A[:, v]
        nodes += 1
        if depth + 1 == n:
            if const < inc_val:
                inc_val = float(const)
                inc_bits = x.copy()
            continue
        bound = const + np.minimum(lin[free], 0.0).sum() + pair_sum
        if bound >= inc_val:
            pruned += 1
            continue
        nv = order[depth + 1]
        first = 1 if lin[nv] < 0 else 0
        stack.append((depth + 1, 1 - first, const, lin, pair_sum))
        stack.append((depth + 1, first, const, lin, pair_sum))

    elapsed = time.perf_counter() - t0
    res = SolveResult.build(
        problem,
        inc_bits,
        evaluations=evaluations + nodes,
        wall_time=elapsed,
        seed=config.seed,
        solver="bnb",
        info={
            "optimal": limit is None,
            "nodes": nodes,
            "pruned": pruned,
            "limit": limit,
            "peak_stack_bytes": peak_bytes,
            "incumbent_start": start.objective,
        },
    )
    return res
