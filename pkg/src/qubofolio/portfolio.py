"""Binary-fraction encoding of the dynamic mean-variance portfolio problem.

The objective over real weights ``w[t, i]`` (periods ``t = 1..T``) is

    sum_t [ -r_t . w_t + lam w_t^T C_t w_t
            + mu sum_i nu_ti (w_ti - w_{t-1,i})^2 + F (sum_i w_ti - 1)^2 ]

with ``w_0 = 0`` (the portfolio starts in cash).  Each weight is a binary
fraction ``w = sum_{k=1..l} 2^-k x_k``.

Bit layout is period-major, then asset, then bit ``k = 1..l``: variable
``(t * n + i) * l + (k - 1)`` holds bit ``k`` of weight ``w[t, i]``.

Toy mode drops the budget penalty and substitutes the last asset's weight by
``1 - sum`` of the others, leaving ``(n - 1) * l`` variables for ``T = 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, QuboError
from .marketdata import Period, PeriodStats, bundled_stats
from .qubo import QuboProblem, as_bits

DYNAMIC = "dynamic"
TOY = "toy"


@dataclass(frozen=True, eq=False)
class PortfolioSpec:
    """Portfolio statistics and parameters, all in fractional units."""

    returns: np.ndarray
    covariances: np.ndarray
    unit_costs: np.ndarray
    risk_aversion: float = 10.0
    cost_sensitivity: float = 20.0
    penalty: float = 100.0
    bits_per_weight: int = 10
    asset_labels: tuple[str, ...] = ()
    period_labels: tuple[str, ...] = ()
    mode: str = DYNAMIC

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.returns, dtype=np.float64))
        nu = np.atleast_2d(np.asarray(self.unit_costs, dtype=np.float64))
        C = np.asarray(self.covariances, dtype=np.float64)
        if C.ndim == 2:
            C = C[None]
        T, n = r.shape
        if nu.shape != (T, n) or C.shape != (T, n, n):
            raise DimensionError(
                f"returns {r.shape}, costs {nu.shape} and covariances {C.shape} disagree"
            )
        for t in range(T):
            if not np.allclose(C[t], C[t].T, rtol=1e-12, atol=0.0):
                raise QuboError(f"covariance of period {t} is not symmetric")
        if np.any(nu < 0):
            raise QuboError("unit transaction costs must be non-negative")
        for name in ("risk_aversion", "cost_sensitivity", "penalty"):
            if getattr(self, name) < 0:
                raise QuboError(f"{name} must be non-negative")
        if int(self.bits_per_weight) < 1:
            raise QuboError("bits_per_weight must be positive")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(C)) and np.all(np.isfinite(nu))):
            raise QuboError("portfolio statistics must be finite")
        labels = tuple(self.asset_labels) or tuple(f"asset{i}" for i in range(n))
        plabels = tuple(self.period_labels) or tuple(f"t{t + 1}" for t in range(T))
        if len(labels) != n or len(plabels) != T:
            raise DimensionError("label counts do not match assets/periods")
        if self.mode not in (DYNAMIC, TOY):
            raise QuboError(f"unknown mode {self.mode!r}")
        if self.mode == TOY and (T != 1 or n < 2):
            raise QuboError("toy mode needs one period and at least two assets")
        object.__setattr__(self, "returns", r)
        object.__setattr__(self, "unit_costs", nu)
        object.__setattr__(self, "covariances", 0.5 * (C + np.swapaxes(C, 1, 2)))
        object.__setattr__(self, "bits_per_weight", int(self.bits_per_weight))
        object.__setattr__(self, "asset_labels", labels)
        object.__setattr__(self, "period_labels", plabels)

    @property
    def n_assets(self) -> int:
        return self.returns.shape[1]

    @property
    def n_periods(self) -> int:
        return self.returns.shape[0]

    @property
    def codec(self) -> "WeightCodec":
        return WeightCodec(self.bits_per_weight)

    @property
    def n_free_weights(self) -> int:
        """Weights carried by bits per period."""
        return self.n_assets - 1 if self.mode == TOY else self.n_assets

    @property
    def n_variables(self) -> int:
        return self.n_periods * self.n_free_weights * self.bits_per_weight

    def replace(self, **changes) -> "PortfolioSpec":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw.update(changes)
        return PortfolioSpec(**kw)

    @classmethod
    def from_stats(cls, stats: Sequence[PeriodStats], **params) -> "PortfolioSpec":
        """Build from percent-unit :class:`PeriodStats` (converted to fractions)."""
        parts = [s.model_units() for s in stats]
        return cls(
            returns=np.array([p[0] for p in parts]),
            unit_costs=np.array([p[1] for p in parts]),
            covariances=np.array([p[2] for p in parts]),
            asset_labels=stats[0].assets,
            period_labels=tuple(s.label for s in stats),
            **params,
        )


@dataclass(frozen=True)
class WeightCodec:
    """Binary fraction ``w = sum_k 2^-k x_k`` over ``bits_per_weight`` bits."""

    bits_per_weight: int
    scale: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "scale", 2.0 ** -np.arange(1, self.bits_per_weight + 1))

    @property
    def resolution(self) -> float:
        return 2.0 ** -self.bits_per_weight

    def decode(self, bits) -> np.ndarray:
        """Decode a ``(..., l)`` bit array to weights of shape ``(...)``."""
        return np.asarray(bits, dtype=np.float64) @ self.scale

    def encode(self, weights) -> np.ndarray:
        """Nearest representable bits for weights in ``[0, 1 - 2^-l]``."""
        l = self.bits_per_weight
        w = np.clip(np.asarray(weights, dtype=np.float64), 0.0, 1.0 - 2.0**-l)
        k = np.rint(w * 2**l).astype(np.int64)
        shifts = np.arange(l - 1, -1, -1)
        return ((k[..., None] >> shifts) & 1).astype(np.int8)


def weight_quadratic_form(spec: PortfolioSpec) -> tuple[np.ndarray, np.ndarray, float]:
    """``(H, g, c)`` with objective ``w^T H w + g . w + c`` over flat weights.

    ``H`` is block tridiagonal in the period index: diagonal blocks
    ``lam C_t + mu (V_t + V_{t+1}) + F 1`` and off-diagonal blocks
    ``-mu V_{t+1}``, with ``V_t = diag(nu_t)`` and ``V_{T+1} = 0``.
    """
    T, n = spec.n_periods, spec.n_assets
    lam, mu, F = spec.risk_aversion, spec.cost_sensitivity, spec.penalty
    H = np.zeros((T * n, T * n))
    g = np.zeros(T * n)
    ones = np.ones((n, n))
    for t in range(T):
        blk = slice(t * n, (t + 1) * n)
        V_next = spec.unit_costs[t + 1] if t + 1 < T else np.zeros(n)
        H[blk, blk] = lam * spec.covariances[t] + mu * np.diag(spec.unit_costs[t] + V_next) + F * ones
        if t + 1 < T:
            nxt = slice((t + 1) * n, (t + 2) * n)
            H[blk, nxt] = -mu * np.diag(V_next)
            H[nxt, blk] = -mu * np.diag(V_next)
        g[blk] = -spec.returns[t] - 2.0 * F
    return H, g, F * T


def _binarize(H: np.ndarray, g: np.ndarray, c: float, codec: WeightCodec) -> QuboProblem:
    s = codec.scale
    Q = np.outer(s, s)
    # w^T H w = 1/2 x^T (2 H (x) Q) x
    return QuboProblem(2.0 * np.kron(H, Q), np.kron(g, s), c)


def build_dynamic_qubo(spec: PortfolioSpec) -> QuboProblem:
    """QUBO with ``n * T * l`` variables for the dynamic objective."""
    if spec.mode != DYNAMIC:
        raise QuboError("spec is in toy mode; use build_toy_qubo")
    H, g, c = weight_quadratic_form(spec)
    return _binarize(H, g, c, spec.codec)


def toy_quadratic_form(spec: PortfolioSpec) -> tuple[np.ndarray, np.ndarray, float]:
    """Objective over the free weights after eliminating the last one.

    With ``w = M u + e`` (``e`` the unit vector of the last asset and
    ``M`` mapping the free weights), ``w^T H w + g . w`` becomes
    ``u^T (M^T H M) u + (2 e^T H M + g^T M) u + e^T H e + g . e``.  The budget
    penalty vanishes identically and is never formed.
    """
    if spec.n_periods != 1:
        raise QuboError("toy substitution needs exactly one period")
    n = spec.n_assets
    if n < 2:
        raise QuboError("toy substitution needs at least two assets")
    lam, mu = spec.risk_aversion, spec.cost_sensitivity
    H = lam * spec.covariances[0] + mu * np.diag(spec.unit_costs[0])
    g = -spec.returns[0]
    M = np.vstack([np.eye(n - 1), -np.ones((1, n - 1))])
    e = np.zeros(n)
    e[-1] = 1.0
    Hu = M.T @ H @ M
    gu = 2.0 * (e @ H @ M) + g @ M
    cu = float(e @ H @ e + g @ e)
    return 0.5 * (Hu + Hu.T), gu, cu


def build_toy_qubo(spec: PortfolioSpec) -> QuboProblem:
    """QUBO with ``(n - 1) * l`` variables; ``F`` has no effect.

    Raises
    ------
    QuboError
        Unless ``spec`` has three assets and one period.
    """
    if spec.n_assets != 3 or spec.n_periods != 1:
        raise QuboError(
            f"toy problem needs 3 assets and 1 period, got {spec.n_assets} and {spec.n_periods}"
        )
    Hu, gu, cu = toy_quadratic_form(spec)
    return _binarize(Hu, gu, cu, spec.codec)


def build_qubo(spec: PortfolioSpec) -> QuboProblem:
    return build_toy_qubo(spec) if spec.mode == TOY else build_dynamic_qubo(spec)


def decode_weights(bits, spec: PortfolioSpec) -> np.ndarray:
    """``(T, n)`` weight matrix decoded from a bit string in the layout of ``spec``."""
    x = as_bits(bits)
    T, l = spec.n_periods, spec.bits_per_weight
    m = spec.n_free_weights
    if x.size != T * m * l:
        raise DimensionError(f"bit string has length {x.size}, spec needs {T * m * l}")
    free = spec.codec.decode(x.reshape(T, m, l))
    if spec.mode == TOY:
        return np.hstack([free, 1.0 - free.sum(axis=1, keepdims=True)])
    return free


def encode_weights(weights, spec: PortfolioSpec) -> np.ndarray:
    """Bit string for the representable weights nearest to ``weights``."""
    W = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    if W.shape != (spec.n_periods, spec.n_assets):
        raise DimensionError(f"weights shape {W.shape}, expected {(spec.n_periods, spec.n_assets)}")
    if spec.mode == TOY:
        W = W[:, :-1]
    return spec.codec.encode(W).reshape(-1)


class PeriodFeasibility(NamedTuple):
    total: float
    deviation: float
    penalty: float


def feasibility_report(weights, spec: PortfolioSpec) -> list[PeriodFeasibility]:
    """Per-period weight sum, deviation from 1 and ``F * deviation^2``."""
    W = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    out = []
    for row in W:
        total = float(row.sum())
        dev = total - 1.0
        out.append(PeriodFeasibility(total, dev, spec.penalty * dev * dev))
    return out


def continuous_objective(weights, spec: PortfolioSpec, include_penalty: bool = True) -> float:
    """Portfolio objective at real weights ``(T, n)``, each term summed explicitly."""
    W = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    if W.shape != (spec.n_periods, spec.n_assets):
        raise DimensionError(f"weights shape {W.shape}, expected {(spec.n_periods, spec.n_assets)}")
    lam, mu, F = spec.risk_aversion, spec.cost_sensitivity, spec.penalty
    total = 0.0
    prev = np.zeros(spec.n_assets)
    for t, w in enumerate(W):
        total -= spec.returns[t] @ w
        total += lam * (w @ spec.covariances[t] @ w)
        total += mu * (spec.unit_costs[t] @ (w - prev) ** 2)
        if include_penalty and spec.mode == DYNAMIC:
            total += F * (w.sum() - 1.0) ** 2
        prev = w
    return float(total)


def continuous_gradient(weights, spec: PortfolioSpec, include_penalty: bool = True) -> np.ndarray:
    """Gradient of :func:`continuous_objective` with respect to ``(T, n)`` weights."""
    W = np.atleast_2d(np.asarray(weights, dtype=np.float64))
    lam, mu, F = spec.risk_aversion, spec.cost_sensitivity, spec.penalty
    T = spec.n_periods
    G = np.zeros_like(W)
    prev = np.zeros(spec.n_assets)
    for t in range(T):
        w = W[t]
        G[t] += -spec.returns[t] + 2.0 * lam * (spec.covariances[t] @ w)
        d = 2.0 * mu * spec.unit_costs[t] * (w - prev)
        G[t] += d
        if t > 0:
            G[t - 1] -= d
        if include_penalty and spec.mode == DYNAMIC:
            G[t] += 2.0 * F * (w.sum() - 1.0)
        prev = w
    return G


# -- spec files -------------------------------------------------------------


def spec_to_dict(spec: PortfolioSpec) -> dict:
    return {
        "assets": list(spec.asset_labels),
        "mode": spec.mode,
        "lambda": spec.risk_aversion,
        "mu": spec.cost_sensitivity,
        "F": spec.penalty,
        "bits_per_weight": spec.bits_per_weight,
        "periods": [
            {
                "label": spec.period_labels[t],
                "returns": spec.returns[t].tolist(),
                "covariance": spec.covariances[t].tolist(),
                "costs": spec.unit_costs[t].tolist(),
            }
            for t in range(spec.n_periods)
        ],
    }


def spec_from_dict(d: dict) -> PortfolioSpec:
    try:
        periods = d["periods"]
        return PortfolioSpec(
            returns=np.array([p["returns"] for p in periods]),
            covariances=np.array([p["covariance"] for p in periods]),
            unit_costs=np.array([p["costs"] for p in periods]),
            risk_aversion=float(d["lambda"]),
            cost_sensitivity=float(d["mu"]),
            penalty=float(d["F"]),
            bits_per_weight=int(d["bits_per_weight"]),
            asset_labels=tuple(d["assets"]),
            period_labels=tuple(p.get("label", "") or f"t{t + 1}" for t, p in enumerate(periods)),
            mode=d.get("mode", DYNAMIC),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, QuboError):
            raise
        raise QuboError(f"malformed portfolio spec: {exc!r}") from None


def load_spec(path) -> PortfolioSpec:
    return spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_spec(spec: PortfolioSpec, path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=1) + "\n", encoding="utf-8")


# -- bundled instances --------------------------------------------------------

INSTANCES = ("toy", "testing", "practical")
TOY_ASSETS = ("AUD", "CAD", "Gold")


def make_instance(name: str) -> PortfolioSpec:
    """Construct a bundled instance from the crisis statistics.

    The single-period instances (toy, testing) carry no transaction-cost
    term; the three-period practical instance charges costs from the
    all-cash start.
    """
    if name == "toy":
        stats = [bundled_stats(Period.DEBT_CRISIS).subset(TOY_ASSETS)]
        return PortfolioSpec.from_stats(
            stats, risk_aversion=10.0, cost_sensitivity=0.0, penalty=100.0, bits_per_weight=3, mode=TOY
        )
    if name == "testing":
        stats = [bundled_stats(Period.GREAT_RECESSION)]
        return PortfolioSpec.from_stats(
            stats, risk_aversion=10.0, cost_sensitivity=0.0, penalty=100.0, bits_per_weight=10
        )
    if name == "practical":
        stats = [bundled_stats(p) for p in (Period.GREAT_RECESSION, Period.DEBT_CRISIS, Period.COVID)]
        return PortfolioSpec.from_stats(
            stats, risk_aversion=10.0, cost_sensitivity=20.0, penalty=100.0, bits_per_weight=14
        )
    raise QuboError(f"unknown instance {name!r}; expected one of {INSTANCES}")


def instance_path(name: str) -> Path:
    if name not in INSTANCES:
        raise QuboError(f"unknown instance {name!r}; expected one of {INSTANCES}")
    return Path(str(resources.files("qubofolio") / "data" / f"{name}.json"))


def load_instance(name: str) -> PortfolioSpec:
    """Load ``toy``, ``testing`` or ``practical`` from the bundled JSON files."""
    return load_spec(instance_path(name))
