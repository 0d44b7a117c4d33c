"""FX bid/ask ingestion and per-period return, cost and covariance statistics.

Unit convention
---------------
Daily returns are in percent, ``100 (FX_t / FX_{t-1} - 1)`` of the mid rate.
:class:`PeriodStats` holds every field as a percentage of the model unit:

* ``returns``: mean daily return times ``trading_days_per_year`` (annualized %)
* ``costs``: mean relative spread ``100 (ask - bid) / mid`` (%, not annualized)
* ``covariance``: covariance of daily *fractional* returns times
  ``trading_days_per_year``, expressed in percent, i.e. the covariance of the
  percent returns times ``trading_days_per_year / 100``

so that dividing all three by 100 (:meth:`PeriodStats.model_units`) yields
the fractional quantities the portfolio objective is written in.  The
bundled crisis tables appear in this presentation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParseError, QuboError

TRADING_DAYS_PER_YEAR = 252
START_SLACK_DAYS = 7


@dataclass(frozen=True, eq=False)
class FxSeries:
    """Daily bid/ask quotes of one currency in ccyCZK notation."""

    currency: str
    dates: np.ndarray
    bid: np.ndarray
    ask: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        bid = np.asarray(self.bid, dtype=np.float64)
        ask = np.asarray(self.ask, dtype=np.float64)
        if not (dates.shape == bid.shape == ask.shape) or dates.ndim != 1:
            raise DimensionError(f"{self.currency}: dates, bid and ask must have equal length")
        if dates.size and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise QuboError(f"{self.currency}: dates must be strictly increasing")
        if np.any(~np.isfinite(bid)) or np.any(~np.isfinite(ask)) or np.any(bid <= 0) or np.any(ask <= 0):
            raise QuboError(f"{self.currency}: rates must be finite and positive")
        if np.any(bid > ask):
            raise QuboError(f"{self.currency}: bid exceeds ask")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "bid", bid)
        object.__setattr__(self, "ask", ask)

    def __len__(self) -> int:
        return self.dates.size

    @classmethod
    def from_rows(cls, currency: str, rows: Sequence[tuple]) -> "FxSeries":
        dates, bid, ask = zip(*rows) if rows else ((), (), ())
        return cls(currency, np.array(dates, dtype="datetime64[D]"), np.array(bid), np.array(ask))


def read_fx_csv(path, currency: str | None = None) -> FxSeries:
    """Read a ``date,bid,ask`` CSV with ISO-8601 dates."""
    path = Path(path)
    currency = currency or path.stem
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["date", "bid", "ask"]:
            raise ParseError(f"{path.name}: expected header 'date,bid,ask'", 1)
        for lineno, rec in enumerate(reader, start=2):
            if not rec or not "".join(rec).strip():
                continue
            if len(rec) != 3:
                raise ParseError(f"{path.name}: expected 3 fields", lineno)
            try:
                rows.append((np.datetime64(rec[0].strip(), "D"), float(rec[1]), float(rec[2])))
            except ValueError as exc:
                raise ParseError(f"{path.name}: {exc}", lineno) from None
    return FxSeries.from_rows(currency, rows)


def mid_rates(series: FxSeries) -> tuple[np.ndarray, np.ndarray]:
    """``(dates, (bid + ask) / 2)``."""
    return series.dates, (series.bid + series.ask) / 2.0


def daily_returns(mids) -> np.ndarray:
    """Percent returns between consecutive rows; length is ``len(mids) - 1``."""
    mids = np.asarray(mids, dtype=np.float64)
    if mids.size < 2:
        raise QuboError("daily returns need at least two rates")
    return 100.0 * (mids[1:] / mids[:-1] - 1.0)


def relative_spreads(series: FxSeries) -> np.ndarray:
    """Daily ``100 (ask - bid) / mid``."""
    _, mid = mid_rates(series)
    return 100.0 * (series.ask - series.bid) / mid


@dataclass(frozen=True, eq=False)
class PeriodStats:
    """Expected returns, costs and covariance for one period (percent units)."""

    assets: tuple[str, ...]
    returns: np.ndarray
    costs: np.ndarray
    covariance: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = len(self.assets)
        r = np.asarray(self.returns, dtype=np.float64)
        c = np.asarray(self.costs, dtype=np.float64)
        C = np.asarray(self.covariance, dtype=np.float64)
        if r.shape != (n,) or c.shape != (n,) or C.shape != (n, n):
            raise DimensionError(f"inconsistent statistics shapes for {n} assets")
        if not np.allclose(C, C.T, rtol=1e-12, atol=0.0):
            raise QuboError("covariance matrix is not symmetric")
        if np.any(np.diag(C) < 0) or np.any(c < 0):
            raise QuboError("variances and costs must be non-negative")
        object.__setattr__(self, "assets", tuple(self.assets))
        object.__setattr__(self, "returns", r)
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "covariance", C)

    def model_units(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(returns, costs, covariance)`` as fractions."""
        return self.returns / 100.0, self.costs / 100.0, self.covariance / 100.0

    def subset(self, assets: Sequence[str]) -> "PeriodStats":
        idx = [self.assets.index(a) for a in assets]
        return PeriodStats(
            tuple(assets),
            self.returns[idx],
            self.costs[idx],
            self.covariance[np.ix_(idx, idx)],
            self.label,
        )


def _add_years(d: date, years: float) -> date:
    whole = int(years)
    frac = years - whole
    try:
        out = d.replace(year=d.year + whole)
    except ValueError:  # 29 February
        out = d.replace(year=d.year + whole, day=28)
    return out + timedelta(days=round(frac * 365.25))


def period_stats(
    series: Sequence[FxSeries],
    start,
    years: float,
    trading_days_per_year: int = TRADING_DAYS_PER_YEAR,
    ddof: int = 1,
    label: str = "",
) -> PeriodStats:
    """Statistics over ``[start, start + years)``, truncated at the data end.

    Rows are aligned on the dates common to all series inside the window;
    returns use consecutive common rows, so weekends and holidays are skipped.

    Raises
    ------
    QuboError
        If a series does not start within a week of ``start`` or has fewer
        than two rows in the window.  The message names the currency.
    """
    if not series:
        raise QuboError("no series given")
    start = np.datetime64(start, "D")
    end = np.datetime64(_add_years(start.astype(date), years), "D")
    masks = []
    for s in series:
        m = (s.dates >= start) & (s.dates < end)
        if m.sum() < 2:
            raise QuboError(f"{s.currency}: fewer than two quotes in the window")
        first = s.dates[m][0]
        if first - start > np.timedelta64(START_SLACK_DAYS, "D"):
            raise QuboError(f"{s.currency}: series does not cover the window start {start}")
        masks.append(m)
    common = series[0].dates[masks[0]]
    for s, m in zip(series[1:], masks[1:]):
        common = np.intersect1d(common, s.dates[m], assume_unique=True)
    if common.size < 2:
        raise QuboError("fewer than two common quote dates in the window")

    rets, spreads = [], []
    for s in series:
        rows = np.searchsorted(s.dates, common)
        _, mid = mid_rates(s)
        rets.append(daily_returns(mid[rows]))
        spreads.append(relative_spreads(s)[rows])
    R = np.vstack(rets)
    D = float(trading_days_per_year)
    cov = np.atleast_2d(np.cov(R, ddof=ddof)) * D / 100.0
    cov = 0.5 * (cov + cov.T)
    return PeriodStats(
        tuple(s.currency for s in series),
        R.mean(axis=1) * D,
        np.vstack(spreads).mean(axis=1),
        cov,
        label,
    )


class Period(str, Enum):
    GREAT_RECESSION = "great_recession"
    DEBT_CRISIS = "debt_crisis"
    COVID = "covid"


BUNDLED_FILES = {p: f"{p.value}.json" for p in Period}


def bundled_path(period: Period | str) -> Path:
    period = Period(period)
    return Path(str(resources.files("qubofolio") / "data" / BUNDLED_FILES[period]))


def bundled_stats(period: Period | str) -> PeriodStats:
    """The transcribed crisis-period statistics (percent units, verbatim)."""
    period = Period(period)
    raw = json.loads(bundled_path(period).read_text(encoding="utf-8"))
    return PeriodStats(
        tuple(raw["assets"]),
        np.array(raw["returns"]),
        np.array(raw["costs"]),
        np.array(raw["covariance"]),
        raw["period"],
    )
