"""Grover search and Grover adaptive search (GAS) for QUBO minimization.

GAS keeps an incumbent ``y`` and repeatedly amplifies the basis states whose
value register ``|f(i) - y>_m`` has its two's-complement sign bit set, i.e.
``f(i) < y``.  A measured index that really improves on ``y`` becomes the new
incumbent.

The joint state after the state-preparation operator is
``sum_i |i>|v_i>`` with ``v_i`` fixed by ``i``, so it is simulated by the
index amplitudes together with one integer ``v_i`` per index.  The oracle
then acts as a phase flip on ``sign(v_i)`` and the diffusion as an inversion
about the mean of the index amplitudes.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import CapacityError, ConfigError, DimensionError
from ..qubo import QuboProblem, SolveResult, all_objectives, evaluate, index_to_bits
from .statevector import MAX_QUBITS, StateVector

FIXED = "fixed"
RANDOMIZED_DOUBLING = "randomized-doubling"
VALUE = "value"
COEFFICIENT = "coefficient"
GROWTH = 8.0 / 7.0


# -- plain Grover search ----------------------------------------------------


def grover_search(n_qubits: int, marked, rounds: int) -> np.ndarray:
    """Measurement distribution after ``rounds`` oracle + diffusion steps."""
    marked = sorted(set(int(m) for m in marked))
    if not marked:
        raise ConfigError("at least one marked state is required")
    if rounds < 0:
        raise ConfigError("rounds must be non-negative")
    state = StateVector.uniform(n_qubits)
    if marked[0] < 0 or marked[-1] >= state.dim:
        raise DimensionError("marked index out of range")
    mask = np.zeros(state.dim, dtype=bool)
    mask[marked] = True
    for _ in range(rounds):
        state.flip_marked(mask).diffuse()
    return state.probabilities()


def success_probability(N: int, M: int, rounds: int) -> float:
    """Closed form ``sin^2((2k + 1) theta)`` with ``theta = asin(sqrt(M / N))``."""
    theta = math.asin(math.sqrt(M / N))
    return math.sin((2 * rounds + 1) * theta) ** 2


def optimal_rounds(N: int, M: int = 1) -> int:
    """Round count maximizing the success probability, ``floor(pi / (4 theta))``."""
    if not 1 <= M <= N:
        raise ConfigError("need 1 <= M <= N")
    theta = math.asin(math.sqrt(M / N))
    return int(math.floor(math.pi / (4.0 * theta)))


def ceiling_rounds(N: int) -> int:
    """The textbook estimate ``ceil(pi sqrt(N) / 4)``; overshoots for N = 8."""
    return int(math.ceil(math.pi * math.sqrt(N) / 4.0))


# -- adaptive search --------------------------------------------------------


@dataclass(frozen=True)
class GroverConfig:
    """Settings of :func:`grover_adaptive_search`.

    ``quantization`` selects what the value register holds.  ``"value"``
    stores ``floor(2^s (f(i) - y))``; its sign bit equals the sign of
    ``f(i) - y`` at any scale.  ``"coefficient"`` rounds every scaled
    coefficient to an integer first, as an adder circuit of width ``m``
    would, and can merge nearly degenerate states at small ``m``.
    ``scale_exponent`` fixes ``s``; by default the largest ``s`` whose range
    fits ``m - 1`` magnitude bits is chosen.
    """

    value_bits: int = 6
    incumbent: float | None = None
    rotation_schedule: str = RANDOMIZED_DOUBLING
    rounds: int | None = None  # fixed schedule; None: optimal_rounds(N, 1)
    max_outer_iterations: int = 20
    quantization: str = VALUE
    scale_exponent: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.value_bits < 2:
            raise ConfigError("value_bits must be at least 2")
        if self.rotation_schedule not in (FIXED, RANDOMIZED_DOUBLING):
            raise ConfigError(f"unknown rotation_schedule {self.rotation_schedule!r}")
        if self.quantization not in (VALUE, COEFFICIENT):
            raise ConfigError(f"unknown quantization {self.quantization!r}")
        if self.max_outer_iterations < 1:
            raise ConfigError("max_outer_iterations must be positive")
        if self.rounds is not None and self.rounds < 0:
            raise ConfigError("rounds must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


def range_bound(problem: QuboProblem, y: float) -> float:
    """Coefficient bound on ``|f(x) - y|`` over all ``x``."""
    A = problem.quad
    pairs = np.abs(np.triu(A, 1)).sum()
    return float(pairs + 0.5 * np.abs(np.diag(A)).sum() + np.abs(problem.lin).sum() + abs(problem.offset - y))


def required_value_bits(bound: float, scale_exponent: int) -> int:
    """Register width holding every integer in ``[-2^s B, 2^s B]``."""
    top = math.ceil(math.ldexp(bound, scale_exponent))
    return max(2, top.bit_length() + 1)


def choose_scale(bound: float, value_bits: int) -> int:
    """Largest ``s`` with ``2^s * bound <= 2^(m-1) - 1``."""
    cap = (1 << (value_bits - 1)) - 1
    if bound <= 0:
        return 0
    return int(math.floor(math.log2(cap / bound)))


def _coefficient_problem(problem: QuboProblem, s: int) -> QuboProblem:
    k = math.ldexp(1.0, s)
    A = problem.quad
    Q = np.round(A * k)
    np.fill_diagonal(Q, 2.0 * np.round(0.5 * np.diag(A) * k))
    return QuboProblem(Q, np.round(problem.lin * k), float(np.round(problem.offset * k)))


def value_register(problem: QuboProblem, y: float, config: GroverConfig, inc_index: int | None = None, objectives=None):
    """Two's-complement words of the value register, one per basis index.

    Returns ``(words, scale_exponent)``.  Raises :class:`ConfigError` when the
    scaled range does not fit ``value_bits``.
    """
    m = config.value_bits
    bound = range_bound(problem, y)
    s = config.scale_exponent if config.scale_exponent is not None else choose_scale(bound, m)
    need = required_value_bits(bound, s)
    if need > m:
        raise ConfigError(f"value register overflow: scale 2^{s} needs value_bits >= {need}, got {m}")
    if config.quantization == VALUE:
        f = all_objectives(problem) if objectives is None else objectives
        v = np.floor(np.ldexp(f - y, s)).astype(np.int64)
    else:
        ft = all_objectives(_coefficient_problem(problem, s))
        ref = ft[inc_index] if inc_index is not None else np.round(math.ldexp(y, s))
        v = (ft - ref).astype(np.int64)
    return v & ((1 << m) - 1), s


def sign_bits(words: np.ndarray, value_bits: int) -> np.ndarray:
    return ((words >> (value_bits - 1)) & 1).astype(bool)


def grover_adaptive_search(problem: QuboProblem, config: GroverConfig | None = None) -> SolveResult:
    """Minimize ``problem`` by Grover adaptive search on a simulated register.

    Without an explicit incumbent the search starts from one measurement of
    the uniform state.  The loop stops after ``max_outer_iterations``
    consecutive measurements that do not improve the incumbent.  ``trace``
    holds ``(measurements, incumbent)`` at every improvement and is strictly
    decreasing.  ``info`` reports the qubit count ``n + m + 1``, the oracle
    calls and the rounds used per iteration.
    """
    config = config or GroverConfig()
    n = problem.dim
    m = config.value_bits
    qubits = n + m + 1
    if qubits > MAX_QUBITS:
        raise CapacityError(f"{qubits} qubits exceed the simulator cap of {MAX_QUBITS}", MAX_QUBITS)
    rng = np.random.default_rng(config.seed)
    N = 1 << n
    t0 = time.perf_counter()
    f_all = all_objectives(problem)

    if config.incumbent is None:
        inc = int(rng.integers(N))
        y = evaluate(problem, index_to_bits(inc, n))
        measurements = 1
    else:
        inc = None
        y = float(config.incumbent)
        measurements = 0
    trace = [(measurements, y)]
    fixed_rounds = config.rounds if config.rounds is not None else optimal_rounds(N, 1)

    oracle_calls = 0
    rounds_used = []
    stall = 0
    k = 1.0
    words, s = value_register(problem, y, config, inc, f_all)
    marked = sign_bits(words, m)
    while stall < config.max_outer_iterations:
        if config.rotation_schedule == FIXED:
            r = fixed_rounds
        else:
            r = int(rng.integers(0, math.ceil(k)))
        state = StateVector.uniform(n)
        for _ in range(r):
            state.flip_marked(marked).diffuse()
        oracle_calls += r
        rounds_used.append(r)
        i = int(state.sample(1, rng)[0])
        measurements += 1
        # classical check of the measured string
        fi = evaluate(problem, index_to_bits(i, n))
        if fi < y:
            y, inc = fi, i
            trace.append((measurements, y))
            stall = 0
            k = 1.0
            words, s = value_register(problem, y, config, inc, f_all)
            marked = sign_bits(words, m)
        else:
            stall += 1
            k = min(k * GROWTH, math.sqrt(N))

    if inc is None:
        # the given incumbent was never beaten; report the last measurement
        inc = i
    return SolveResult.build(
        problem,
        index_to_bits(inc, n),
        evaluations=measurements,
        wall_time=time.perf_counter() - t0,
        trace=trace,
        seed=config.seed,
        solver="gas",
        info={
            "qubits": qubits,
            "oracle_calls": oracle_calls,
            "rounds": rounds_used,
            "scale_exponent": s,
            "improved": len(trace) > 1,
            "config": config.to_dict(),
        },
    )
