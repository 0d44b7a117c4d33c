"""Projected gradient descent for the continuous portfolio problem.

The budget penalty is dropped and every period's weights are kept on the
probability simplex by Euclidean projection after each step.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigError
from ..portfolio import PortfolioSpec, continuous_gradient, continuous_objective


@dataclass(frozen=True)
class GradientConfig:
    step_size: float | None = None  # None: 1 / L from the Hessian spectrum
    max_iterations: int = 5000
    convergence_tolerance: float = 1e-12
    restarts: int = 8
    halving: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.step_size is not None and not self.step_size > 0:
            raise ConfigError("step_size must be positive")
        if self.max_iterations < 1 or self.restarts < 1:
            raise ConfigError("max_iterations and restarts must be positive")
        if not self.convergence_tolerance >= 0:
            raise ConfigError("convergence_tolerance must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class GradientResult:
    weights: np.ndarray
    objective: float
    objective_with_penalty: float
    converged: bool
    iterations: int
    wall_time: float
    trace: list[float]
    seed: int


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection of each row of ``v`` onto ``{w >= 0, sum w = 1}``."""
    V = np.atleast_2d(np.asarray(v, dtype=np.float64))
    n = V.shape[1]
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    k = np.arange(1, n + 1)
    rho = np.count_nonzero(U - css / k > 0, axis=1)
    theta = css[np.arange(V.shape[0]), rho - 1] / rho
    W = np.maximum(V - theta[:, None], 0.0)
    return W.reshape(np.shape(v)) if np.ndim(v) == 1 else W


def hessian(spec: PortfolioSpec) -> np.ndarray:
    """Constant Hessian of the penalty-free objective over flattened weights."""
    shape = (spec.n_periods, spec.n_assets)
    size = shape[0] * shape[1]
    g0 = continuous_gradient(np.zeros(shape), spec, include_penalty=False).ravel()
    H = np.empty((size, size))
    for k in range(size):
        e = np.zeros(size)
        e[k] = 1.0
        H[:, k] = continuous_gradient(e.reshape(shape), spec, include_penalty=False).ravel() - g0
    return 0.5 * (H + H.T)


def _descend(W, spec, step, config):
    f = continuous_objective(W, spec, include_penalty=False)
    trace = [f]
    for it in range(1, config.max_iterations + 1):
        G = continuous_gradient(W, spec, include_penalty=False)
        s = step
        while True:
            W_new = project_to_simplex(W - s * G)
            f_new = continuous_objective(W_new, spec, include_penalty=False)
            if f_new <= f or not config.halving or s < 1e-12 * step:
                break
            s *= 0.5
        done = f - f_new <= config.convergence_tolerance and np.abs(W_new - W).max() < 1e-9
        if f_new <= f:
            W, f = W_new, f_new
        trace.append(f)
        if done:
            return W, f, True, it, trace
    return W, f, False, config.max_iterations, trace


def projected_gradient(spec: PortfolioSpec, config: GradientConfig | None = None) -> GradientResult:
    """Multistart projected gradient; the first start is the equal-weight portfolio.

    ``objective`` excludes the budget penalty, ``objective_with_penalty``
    includes it (the two agree at a feasible point).  ``converged`` is true
    when the best start met the tolerance before ``max_iterations``.
    """
    config = config or GradientConfig()
    rng = np.random.default_rng(config.seed)
    T, n = spec.n_periods, spec.n_assets
    t0 = time.perf_counter()
    if config.step_size is None:
        L = float(np.linalg.eigvalsh(hessian(spec)).max())
        step = 1.0 / L if L > 0 else 1.0
    else:
        step = config.step_size

    best = None
    for r in range(config.restarts):
        W0 = np.full((T, n), 1.0 / n) if r == 0 else rng.dirichlet(np.ones(n), size=T)
        W, f, conv, its, trace = _descend(W0, spec, step, config)
        if best is None or f < best[1]:
            best = (W, f, conv, its, trace)
    W, f, conv, its, trace = best
    return GradientResult(
        weights=W,
        objective=float(f),
        objective_with_penalty=float(f + spec.penalty * np.sum((W.sum(axis=1) - 1.0) ** 2)),
        converged=conv,
        iterations=its,
        wall_time=time.perf_counter() - t0,
        trace=trace,
        seed=config.seed,
    )
