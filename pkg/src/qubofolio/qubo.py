"""QUBO and Ising problem representations.

A QUBO problem is stored in matrix form

    f(x) = 1/2 x^T A x + b^T x + c,    x in {0, 1}^n

with ``A`` symmetric.  Because of the factor 1/2, the coefficient of the
monomial ``x_i x_j`` (i < j) is ``A[i, j]`` and the coefficient of the
linear-looking diagonal term ``x_i^2 = x_i`` is ``A[i, i] / 2``.  The
problem-file format stores monomial coefficients, so ``quad i j v`` with
``i < j`` sets ``A[i, j] = A[j, i] = v`` and ``quad i i v`` sets
``A[i, i] = 2 v``.

Bit string ``k`` of an enumeration is the binary expansion of ``k`` with
``x_0`` as the most significant bit, so integer order and lexicographic
order of bit tuples coincide.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import CapacityError, DimensionError, ParseError, QuboError

SYMMETRY_WARN_TOL = 1e-9
BRUTE_FORCE_CAP = 30


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuboProblem:
    """Immutable QUBO problem ``1/2 x^T A x + b^T x + c``.

    Parameters
    ----------
    quad : array_like, shape (n, n)
        Quadratic matrix ``A``.  Non-symmetric input is replaced by
        ``(A + A^T) / 2``; a warning is emitted when the asymmetry exceeds
        ``1e-9`` relative to the largest entry.
    lin : array_like, shape (n,)
        Linear vector ``b``.
    offset : float
        Constant ``c``.
    """

    quad: np.ndarray
    lin: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        quad = np.array(self.quad, dtype=np.float64, copy=True)
        lin = np.array(self.lin, dtype=np.float64, copy=True).reshape(-1)
        if quad.ndim != 2 or quad.shape[0] != quad.shape[1]:
            raise DimensionError(f"quadratic part must be square, got shape {quad.shape}")
        if quad.shape[0] != lin.shape[0]:
            raise DimensionError(
                f"quadratic part is {quad.shape[0]}x{quad.shape[0]} but linear part has length {lin.shape[0]}"
            )
        if quad.shape[0] < 1:
            raise DimensionError("a QUBO problem needs at least one variable")
        offset = float(self.offset)
        if not (np.all(np.isfinite(quad)) and np.all(np.isfinite(lin)) and math.isfinite(offset)):
            raise QuboError("QUBO coefficients must be finite")
        asym = np.max(np.abs(quad - quad.T)) if quad.size else 0.0
        if asym > 0.0:
            scale = max(np.max(np.abs(quad)), 1.0)
            if asym > SYMMETRY_WARN_TOL * scale:
                warnings.warn(
                    f"quadratic matrix asymmetric by {asym:.3g}; symmetrizing",
                    stacklevel=3,
                )
            quad = 0.5 * (quad + quad.T)
        object.__setattr__(self, "quad", _readonly(quad))
        object.__setattr__(self, "lin", _readonly(lin))
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return self.lin.shape[0]

    @classmethod
    def from_terms(
        cls,
        n: int,
        linear: dict[int, float] | None = None,
        quadratic: dict[tuple[int, int], float] | None = None,
        offset: float = 0.0,
    ) -> "QuboProblem":
        """Build a problem from sum-form monomial coefficients.

        ``quadratic[(i, j)]`` is the coefficient of ``x_i x_j``; repeated or
        reversed keys accumulate.
        """
        quad = np.zeros((n, n))
        lin = np.zeros(n)
        for i, v in (linear or {}).items():
            lin[i] += v
        for (i, j), v in (quadratic or {}).items():
            if i == j:
                quad[i, i] += 2.0 * v
            else:
                quad[i, j] += v
                quad[j, i] += v
        return cls(quad, lin, offset)

    def terms(self) -> tuple[dict[int, float], dict[tuple[int, int], float]]:
        """Nonzero monomial coefficients ``(linear, quadratic)`` with i <= j."""
        n = self.dim
        linear = {i: float(self.lin[i]) for i in range(n) if self.lin[i] != 0.0}
        quadratic = {}
        for i in range(n):
            if self.quad[i, i] != 0.0:
                quadratic[(i, i)] = float(self.quad[i, i]) / 2.0
            for j in range(i + 1, n):
                if self.quad[i, j] != 0.0:
                    quadratic[(i, j)] = float(self.quad[i, j])
        return linear, quadratic

    def __repr__(self) -> str:
        return f"QuboProblem(dim={self.dim}, offset={self.offset!r})"


def as_bits(bits: Sequence[int] | np.ndarray, n: int | None = None) -> np.ndarray:
    """Validate and convert a bit string to an int8 array."""
    x = np.asarray(bits)
    if x.ndim != 1:
        raise DimensionError(f"bit string must be one-dimensional, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise DimensionError(f"bit string has length {x.shape[0]}, problem has {n} variables")
    if not np.all((x == 0) | (x == 1)):
        raise QuboError("bit string entries must be 0 or 1")
    return x.astype(np.int8)


def evaluate(problem: QuboProblem, bits) -> float:
    """Objective value ``1/2 x^T A x + b^T x + c`` in double precision."""
    x = as_bits(bits, problem.dim).astype(np.float64)
    return float(0.5 * (x @ problem.quad @ x) + problem.lin @ x + problem.offset)


def evaluate_many(problem: QuboProblem, X: np.ndarray) -> np.ndarray:
    """Vectorized objective for the rows of a 0/1 matrix ``X``."""
    X = np.asarray(X, dtype=np.float64)
    return 0.5 * np.einsum("ki,ki->k", X @ problem.quad, X) + X @ problem.lin + problem.offset


def index_to_bits(index: int | np.ndarray, n: int) -> np.ndarray:
    """Bits of basis index ``index`` with ``x_0`` as the most significant bit."""
    index = np.asarray(index, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((index[..., None] >> shifts) & 1).astype(np.int8)


def bits_to_index(bits) -> int:
    x = as_bits(bits)
    out = 0
    for v in x:
        out = (out << 1) | int(v)
    return out


def all_objectives(problem: QuboProblem, chunk: int = 1 << 16) -> np.ndarray:
    """Objective of every basis state, in index order (2^n values)."""
    n = problem.dim
    if n > BRUTE_FORCE_CAP:
        raise CapacityError(f"enumeration of {n} variables exceeds cap {BRUTE_FORCE_CAP}", BRUTE_FORCE_CAP)
    total = 1 << n
    out = np.empty(total)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        out[start : start + idx.size] = evaluate_many(problem, index_to_bits(idx, n))
    return out


@dataclass
class SolveResult:
    """Outcome of one solver run.

    ``objective`` is always recomputed from ``bits`` with :func:`evaluate`
    when built through :meth:`build`, so it cannot go stale.
    """

    bits: np.ndarray
    objective: float
    evaluations: int = 0
    wall_time: float = 0.0
    trace: list[tuple[int, float]] | None = None
    seed: int | None = None
    solver: str = ""
    info: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def build(cls, problem: QuboProblem, bits, **kwargs) -> "SolveResult":
        x = as_bits(bits, problem.dim)
        return cls(bits=x, objective=evaluate(problem, x), **kwargs)

    def check(self, problem: QuboProblem) -> bool:
        return evaluate(problem, self.bits) == self.objective


def brute_force(problem: QuboProblem, cap: int = BRUTE_FORCE_CAP, chunk: int = 1 << 16) -> SolveResult:
    """Exhaustive minimization over all ``2^n`` bit strings.

    Ties are broken towards the lexicographically smallest bit string.

    Raises
    ------
    CapacityError
        If ``problem.dim`` exceeds ``cap``.
    """
    n = problem.dim
    if n > cap:
        raise CapacityError(f"brute force limited to {cap} variables, problem has {n}", cap)
    t0 = time.perf_counter()
    total = 1 << n
    best_val = math.inf
    best_idx = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        vals = evaluate_many(problem, index_to_bits(idx, n))
        k = int(np.argmin(vals))
        # strict comparison keeps the earliest (smallest) index on ties
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_idx = start + k
    elapsed = time.perf_counter() - t0
    return SolveResult.build(
        problem,
        index_to_bits(best_idx, n),
        evaluations=total,
        wall_time=elapsed,
        solver="brute_force",
    )


@dataclass(frozen=True, eq=False)
class IsingModel:
    """Ising energy ``sum_{i<j} J_ij z_i z_j + sum_i h_i z_i + offset``."""

    n: int
    couplings: dict[tuple[int, int], float]
    fields: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        fields = np.array(self.fields, dtype=np.float64, copy=True).reshape(-1)
        if fields.shape[0] != self.n:
            raise DimensionError(f"{self.n} spins but {fields.shape[0]} fields")
        clean = {}
        for (i, j), v in self.couplings.items():
            if i == j:
                raise QuboError(f"self-coupling ({i}, {i}) is not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise DimensionError(f"coupling ({i}, {j}) out of range for {self.n} spins")
            key = (min(i, j), max(i, j))
            clean[key] = clean.get(key, 0.0) + float(v)
        vals = list(clean.values()) + [float(self.offset)]
        if not (np.all(np.isfinite(fields)) and all(math.isfinite(v) for v in vals)):
            raise QuboError("Ising coefficients must be finite")
        object.__setattr__(self, "couplings", clean)
        object.__setattr__(self, "fields", _readonly(fields))
        object.__setattr__(self, "offset", float(self.offset))

    def coupling_matrix(self) -> np.ndarray:
        """Strictly upper-triangular dense coupling matrix."""
        J = np.zeros((self.n, self.n))
        for (i, j), v in self.couplings.items():
            J[i, j] = v
        return J


def to_ising(problem: QuboProblem) -> IsingModel:
    """Map a QUBO to an Ising model via ``x_i = (1 - z_i) / 2``.

    For every bit string ``x`` with spins ``z = 1 - 2x`` the Ising energy
    equals the QUBO objective.
    """
    n = problem.dim
    A, b = problem.quad, problem.lin
    fields = -0.5 * b.copy()
    offset = problem.offset + 0.5 * b.sum()
    diag = np.diag(A)
    fields -= diag / 4.0
    offset += diag.sum() / 4.0
    couplings = {}
    for i in range(n):
        for j in range(i + 1, n):
            a = A[i, j]
            if a != 0.0:
                couplings[(i, j)] = a / 4.0
                fields[i] -= a / 4.0
                fields[j] -= a / 4.0
                offset += a / 4.0
    return IsingModel(n, couplings, fields, offset)


def from_ising(model: IsingModel) -> QuboProblem:
    """Inverse of :func:`to_ising` via ``z_i = 1 - 2 x_i``."""
    n = model.n
    quad = np.zeros((n, n))
    lin = -2.0 * model.fields.copy()
    offset = model.offset + model.fields.sum()
    for (i, j), q in model.couplings.items():
        quad[i, j] += 4.0 * q
        quad[j, i] += 4.0 * q
        lin[i] -= 2.0 * q
        lin[j] -= 2.0 * q
        offset += q
    return QuboProblem(quad, lin, offset)


def ising_energy(model: IsingModel, spins) -> float:
    z = np.asarray(spins)
    if z.shape != (model.n,):
        raise DimensionError(f"expected {model.n} spins, got shape {z.shape}")
    if not np.all(np.abs(z) == 1):
        raise QuboError("spins must be +1 or -1")
    z = z.astype(np.float64)
    e = model.offset + float(model.fields @ z)
    for (i, j), q in model.couplings.items():
        e += q * z[i] * z[j]
    return float(e)


def ising_energies(model: IsingModel, Z: np.ndarray) -> np.ndarray:
    """Vectorized Ising energy for rows of a +-1 matrix."""
    Z = np.asarray(Z, dtype=np.float64)
    J = model.coupling_matrix()
    return np.einsum("ki,ij,kj->k", Z, J, Z) + Z @ model.fields + model.offset


# -- problem files ----------------------------------------------------------


def save_problem(problem: QuboProblem, path) -> None:
    """Write ``problem`` in the line-oriented ``qubo`` text format."""
    linear, quadratic = problem.terms()
    lines = [f"qubo {problem.dim}", f"offset {problem.offset!r}"]
    lines += [f"lin {i} {v!r}" for i, v in sorted(linear.items())]
    lines += [f"quad {i} {j} {v!r}" for (i, j), v in sorted(quadratic.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_float(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", lineno)
    return v


def _parse_index(tok: str, n: int, lineno: int) -> int:
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(f"not an index: {tok!r}", lineno) from None
    if not 0 <= i < n:
        raise ParseError(f"index {i} out of range for {n} variables", lineno)
    return i


def parse_problem(text: str) -> QuboProblem:
    """Parse the text of a problem file; see :func:`save_problem`."""
    n = None
    offset = None
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if n is None:
            if len(tok) != 2 or tok[0] != "qubo":
                raise ParseError("expected header 'qubo <n>'", lineno)
            try:
                n = int(tok[1])
            except ValueError:
                raise ParseError(f"bad variable count {tok[1]!r}", lineno) from None
            if n < 1:
                raise ParseError("variable count must be positive", lineno)
            continue
        if offset is None:
            if len(tok) != 2 or tok[0] != "offset":
                raise ParseError("expected 'offset <c>' after header", lineno)
            offset = _parse_float(tok[1], lineno)
            continue
        kind = tok[0]
        if kind == "lin" and len(tok) == 3:
            i = _parse_index(tok[1], n, lineno)
            if i in linear:
                raise ParseError(f"duplicate linear entry for {i}", lineno)
            linear[i] = _parse_float(tok[2], lineno)
        elif kind == "quad" and len(tok) == 4:
            i = _parse_index(tok[1], n, lineno)
            j = _parse_index(tok[2], n, lineno)
            if i > j:
                raise ParseError(f"quad entry needs i <= j, got {i} > {j}", lineno)
            if (i, j) in quadratic:
                raise ParseError(f"duplicate quad entry for ({i}, {j})", lineno)
            quadratic[(i, j)] = _parse_float(tok[3], lineno)
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    if n is None:
        raise ParseError("empty problem file")
    if offset is None:
        raise ParseError("missing 'offset' line")
    return QuboProblem.from_terms(n, linear, quadratic, offset)


def load_problem(path) -> QuboProblem:
    return parse_problem(Path(path).read_text(encoding="utf-8"))
