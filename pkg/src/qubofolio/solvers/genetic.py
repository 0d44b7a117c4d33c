"""Steady-state genetic optimization over bit strings.

Parents are chosen by size-2 tournaments, recombined by single-point
crossover and mutated bit by bit.  An offspring enters the population only
if it is strictly better than the current worst member, which it replaces;
worse offspring are discarded.  The best ``elite_count`` members are never
replaced.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigError
from ..qubo import QuboProblem, SolveResult, evaluate_many


@dataclass(frozen=True)
class GeneticConfig:
    population_size: int = 50
    generations: int = 200
    mutation_rate: float | None = None  # None: 1 / n
    crossover_rate: float = 0.9
    elite_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be at least 2")
        if self.generations < 1:
            raise ConfigError("generations must be positive")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError("mutation_rate must lie in [0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError("crossover_rate must lie in [0, 1]")
        if not 0 <= self.elite_count < self.population_size:
            raise ConfigError("elite_count must be smaller than population_size")

    def to_dict(self) -> dict:
        return asdict(self)


def _tournament(rng, fitness, k):
    a = rng.integers(0, fitness.size, size=k)
    b = rng.integers(0, fitness.size, size=k)
    return np.where(fitness[a] <= fitness[b], a, b)


def genetic_optimize(problem: QuboProblem, config: GeneticConfig | None = None) -> SolveResult:
    config = config or GeneticConfig()
    rng = np.random.default_rng(config.seed)
    n = problem.dim
    P = config.population_size
    rate = config.mutation_rate if config.mutation_rate is not None else 1.0 / n
    t0 = time.perf_counter()

    pop = rng.integers(0, 2, size=(P, n)).astype(np.int8)
    fit = evaluate_many(problem, pop)
    evaluations = P
    best = int(np.argmin(fit))
    trace = [(0, float(fit[best]))]

    for gen in range(1, config.generations + 1):
        pa = pop[_tournament(rng, fit, P)]
        pb = pop[_tournament(rng, fit, P)]
        cut = rng.integers(1, n, size=P) if n > 1 else np.zeros(P, dtype=np.int64)
        do_cross = rng.random(P) < config.crossover_rate
        mask = (np.arange(n)[None, :] >= cut[:, None]) & do_cross[:, None]
        kids = np.where(mask, pb, pa)
        flips = rng.random((P, n)) < rate
        kids = (kids ^ flips).astype(np.int8)
        kid_fit = evaluate_many(problem, kids)
        evaluations += P

        elite = np.argsort(fit, kind="stable")[: config.elite_count]
        open_fit = fit.copy()
        open_fit[elite] = -np.inf
        for c in range(P):
            worst = int(np.argmax(open_fit))
            if kid_fit[c] < fit[worst]:
                pop[worst] = kids[c]
                fit[worst] = kid_fit[c]
                open_fit[worst] = kid_fit[c]
        best = int(np.argmin(fit))
        trace.append((gen, float(fit[best])))

    elapsed = time.perf_counter() - t0
    return SolveResult.build(
        problem,
        pop[best],
        evaluations=evaluations,
        wall_time=elapsed,
        trace=trace,
        seed=config.seed,
        solver="ga",
        info={"config": config.to_dict()},
    )
