"""QAOA and VQE on the diagonal cost Hamiltonian of a QUBO.

Both circuits are simulated exactly.  The cost operator is diagonal in the
computational basis, so its expectation is ``sum_i |a_i|^2 f(i)`` and the
QAOA phase layer is ``a_i -> exp(-1j gamma f(i)) a_i``.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from ..errors import CapacityError, ConfigError, DimensionError
from ..qubo import QuboProblem, SolveResult, all_objectives, index_to_bits
from .statevector import MAX_QUBITS, StateVector

SIMPLEX = "simplex-descent"
COORDINATE = "coordinate-descent"


@dataclass(frozen=True)
class VariationalConfig:
    layers: int = 1
    initial_parameters: tuple[float, ...] | None = None
    optimizer: str = SIMPLEX
    max_evaluations: int = 2000
    shots: int = 0
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.layers < 1:
            raise ConfigError("layers must be at least 1")
        if self.optimizer not in (SIMPLEX, COORDINATE):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.max_evaluations < 1 or self.restarts < 1:
            raise ConfigError("max_evaluations and restarts must be positive")
        if self.shots < 0:
            raise ConfigError("shots must be non-negative")
        if self.initial_parameters is not None:
            object.__setattr__(self, "initial_parameters", tuple(float(p) for p in self.initial_parameters))

    def to_dict(self) -> dict:
        return asdict(self)


def energy_expectation(state: StateVector, problem: QuboProblem, shots: int = 0, rng=None, objectives=None) -> float:
    """``<psi|H|psi>`` of the diagonal cost operator; sampled when ``shots > 0``."""
    if state.n_qubits != problem.dim:
        raise DimensionError(f"state has {state.n_qubits} qubits, problem has {problem.dim} variables")
    f = all_objectives(problem) if objectives is None else objectives
    p = state.probabilities()
    if shots <= 0:
        return float(p @ f)
    rng = rng if rng is not None else np.random.default_rng()
    idx = rng.choice(p.size, size=shots, p=p / p.sum())
    return float(f[idx].mean())


def coefficient_scale(problem: QuboProblem) -> float:
    """Bound on ``|f(x) - c|`` used to normalize the QAOA phase angles."""
    A = problem.quad
    k = np.abs(np.triu(A, 1)).sum() + 0.5 * np.abs(np.diag(A)).sum() + np.abs(problem.lin).sum()
    return float(k) if k > 0 else 1.0


def _check(problem: QuboProblem) -> None:
    if problem.dim > MAX_QUBITS:
        raise CapacityError(f"{problem.dim} qubits exceed the simulator cap of {MAX_QUBITS}", MAX_QUBITS)


# -- circuits ---------------------------------------------------------------


def qaoa_state(params, objectives: np.ndarray, n: int) -> StateVector:
    """``prod_j exp(-i beta_j X) exp(-i gamma_j f)`` applied to the uniform state.

    ``params`` is ``(gamma_1..gamma_p, beta_1..beta_p)``.
    """
    params = np.asarray(params, dtype=np.float64)
    p = params.size // 2
    gammas, betas = params[:p], params[p:]
    state = StateVector.uniform(n)
    for g, b in zip(gammas, betas):
        state.apply_phases(-g * objectives)
        state.rx_layer(2.0 * b)
    return state


def vqe_state(params, n: int, layers: int) -> StateVector:
    """Ry layer, then ``layers`` blocks of a controlled-Z chain and an Ry layer."""
    theta = np.asarray(params, dtype=np.float64).reshape(layers + 1, n)
    state = StateVector.zero(n)
    state.ry_layer(theta[0])
    for row in theta[1:]:
        state.cz_chain()
        state.ry_layer(row)
    return state


def n_parameters(algorithm: str, n: int, layers: int) -> int:
    return 2 * layers if algorithm == "qaoa" else (layers + 1) * n


# -- optimization -----------------------------------------------------------


def _coordinate_descent(fun, x0, max_evaluations, width):
    x = np.array(x0, dtype=np.float64)
    fx = fun(x)
    evals = 1
    sweeps = 0
    while evals < max_evaluations:
        sweeps += 1
        old = fx
        for k in range(x.size):
            def line(t, k=k):
                y = x.copy()
                y[k] = t
                return fun(y)

            res = minimize_scalar(line, bounds=(x[k] - width[k], x[k] + width[k]), method="bounded",
                                  options={"maxiter": 30, "xatol": 1e-6})
            evals += res.nfev
            if res.fun < fx:
                x[k], fx = res.x, res.fun
            if evals >= max_evaluations:
                break
        if old - fx < 1e-12:
            break
    return x, fx, evals, sweeps


def _optimize(fun, x0, config, width):
    if config.optimizer == SIMPLEX:
        res = minimize(fun, x0, method="Nelder-Mead",
                       options={"maxfev": config.max_evaluations, "xatol": 1e-6, "fatol": 1e-12, "adaptive": True})
        return np.asarray(res.x), float(res.fun), int(res.nfev), int(res.nit)
    return _coordinate_descent(fun, x0, config.max_evaluations, width)


def _run(problem: QuboProblem, config: VariationalConfig, algorithm: str) -> SolveResult:
    _check(problem)
    n = problem.dim
    f = all_objectives(problem)
    size = n_parameters(algorithm, n, config.layers)
    if config.initial_parameters is not None and len(config.initial_parameters) != size:
        raise ConfigError(f"{algorithm} with {config.layers} layers takes {size} parameters, "
                          f"got {len(config.initial_parameters)}")
    rng = np.random.default_rng(config.seed)
    t0 = time.perf_counter()
    p = config.layers

    if algorithm == "qaoa":
        kappa = coefficient_scale(problem)
        build = lambda th: qaoa_state(th, f, n)  # noqa: E731
        width = np.concatenate([np.full(p, np.pi / kappa), np.full(p, np.pi / 2)])

        def draw():
            return np.concatenate([rng.uniform(0, np.pi, p) / kappa, rng.uniform(0, np.pi / 2, p)])
    else:
        build = lambda th: vqe_state(th, n, p)  # noqa: E731
        width = np.full(size, np.pi)

        def draw():
            return rng.uniform(-np.pi, np.pi, size)

    def energy(th):
        return energy_expectation(build(th), problem, config.shots, rng, f)

    runs = []
    total_evals = 0
    for r in range(config.restarts):
        x0 = np.array(config.initial_parameters) if (r == 0 and config.initial_parameters is not None) else draw()
        x, e, evals, iters = _optimize(energy, x0, config, width)
        total_evals += evals
        probs = build(x).probabilities()
        top = int(np.argmax(probs))
        runs.append({"parameters": x, "energy": float(e), "index": top, "probability": float(probs[top]),
                     "objective": float(f[top]), "evaluations": evals, "iterations": iters})

    best = min(runs, key=lambda d: (d["objective"], d["energy"]))
    return SolveResult.build(
        problem,
        index_to_bits(best["index"], n),
        evaluations=total_evals,
        wall_time=time.perf_counter() - t0,
        trace=[(i + 1, float(v)) for i, v in enumerate(np.minimum.accumulate([d["objective"] for d in runs]))],
        seed=config.seed,
        solver=algorithm,
        info={
            "parameters": best["parameters"].tolist(),
            "energy": best["energy"],
            "probability": best["probability"],
            "iterations": best["iterations"],
            "restarts": [{k: v for k, v in d.items() if k != "parameters"} for d in runs],
            "config": config.to_dict(),
        },
    )


def qaoa(problem: QuboProblem, config: VariationalConfig | None = None) -> SolveResult:
    """Optimize a depth-``layers`` QAOA circuit; the readout is its most probable state.

    Initial phase angles are scaled by the inverse coefficient bound so the
    first layer neither under- nor over-rotates.  With several restarts the
    best readout is returned and each restart is summarized in ``info``.
    """
    return _run(problem, config or VariationalConfig(), "qaoa")


def vqe(problem: QuboProblem, config: VariationalConfig | None = None) -> SolveResult:
    """Optimize the Ry / controlled-Z ansatz with ``(layers + 1) n`` angles."""
    return _run(problem, config or VariationalConfig(), "vqe")
