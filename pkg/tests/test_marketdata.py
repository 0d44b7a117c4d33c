from __future__ import annotations

import hashlib
import json

import numpy as np
import pytest

from qubofolio.errors import DimensionError, ParseError, QuboError
from qubofolio.marketdata import (
    FxSeries,
    Period,
    PeriodStats,
    bundled_path,
    bundled_stats,
    daily_returns,
    mid_rates,
    period_stats,
    read_fx_csv,
    relative_spreads,
)

CHECKSUMS = {
    "great_recession": "bb5b8f0df62a7bc2bb34d88e15b45d231d1e841648ada87d5490760b5d3ae1e1",
    "debt_crisis": "71e851e9a6800102daa864150c7b35e049564b65e0ebb1b7761b7b400a6592e3",
    "covid": "8a2722d48003e8f949654197686fcd58189c826ff06ba349971c7e74d6e47e7e",
}


def series_from_mids(name, start, mids, spread):
    mids = np.asarray(mids, dtype=float)
    dates = np.datetime64(start, "D") + np.arange(mids.size)
    return FxSeries(name, dates, mids * (1 - spread / 2), mids * (1 + spread / 2))


class TestSeries:
    def test_validation(self):
        d = np.array(["2020-01-01", "2020-01-02"], dtype="datetime64[D]")
        with pytest.raises(QuboError):
            FxSeries("X", d[::-1], [1, 1], [1, 1])
        with pytest.raises(QuboError):
            FxSeries("X", d, [1.1, 1], [1, 1])
        with pytest.raises(QuboError):
            FxSeries("X", d, [0, 1], [1, 1])
        with pytest.raises(DimensionError):
            FxSeries("X", d, [1], [1, 1])

    def test_mid_and_spread(self):
        s = series_from_mids("X", "2020-01-01", [2.0, 4.0], 0.01)
        _, mid = mid_rates(s)
        assert np.allclose(mid, [2.0, 4.0], rtol=1e-15)
        assert np.allclose(relative_spreads(s), [1.0, 1.0], rtol=1e-12)

    def test_returns_in_percent(self):
        assert daily_returns([1.0, 2.0, 1.0]).tolist() == [100.0, -50.0]
        with pytest.raises(QuboError):
            daily_returns([1.0])


class TestCsv:
    def test_read(self, tmp_path):
        p = tmp_path / "EUR.csv"
        p.write_text("date,bid,ask\n2020-01-02,25.1,25.3\n2020-01-03,25.2,25.4\n")
        s = read_fx_csv(p)
        assert s.currency == "EUR" and len(s) == 2
        assert s.bid.tolist() == [25.1, 25.2]

    def test_bad_header(self, tmp_path):
        p = tmp_path / "EUR.csv"
        p.write_text("day,bid,ask\n")
        with pytest.raises(ParseError, match="line 1"):
            read_fx_csv(p)

    def test_bad_row_line_number(self, tmp_path):
        p = tmp_path / "EUR.csv"
        p.write_text("date,bid,ask\n2020-01-02,25.1,25.3\n2020-01-03,abc,25.4\n")
        with pytest.raises(ParseError, match="line 3"):
            read_fx_csv(p)


class TestPeriodStats:
    def test_closed_form(self):
        K = 50  # 2K returns per series
        up_down = [1.0, 2.0] * K + [1.0]  # returns +100 %, -50 %
        down_up = [4.0, 2.0] * K + [4.0]  # returns -50 %, +100 %
        flat = [3.0] * (2 * K + 1)
        series = [
            series_from_mids("A", "2020-01-01", up_down, 0.002),
            series_from_mids("B", "2020-01-01", down_up, 0.004),
            series_from_mids("C", "2020-01-01", flat, 0.0),
        ]
        st = period_stats(series, "2020-01-01", years=1.0, trading_days_per_year=252)
        var = 2 * K * 75.0**2 / (2 * K - 1)  # percent^2, ddof = 1
        assert st.returns == pytest.approx([25.0 * 252, 25.0 * 252, 0.0], rel=1e-12, abs=1e-12)
        assert st.costs == pytest.approx([0.2, 0.4, 0.0], rel=1e-12, abs=1e-12)
        expected = np.array([[var, -var, 0.0], [-var, var, 0.0], [0.0, 0.0, 0.0]]) * 252 / 100
        assert np.allclose(st.covariance, expected, rtol=1e-12, atol=1e-12)

    def test_window_truncates_and_aligns(self):
        a = series_from_mids("A", "2020-01-01", np.linspace(1, 2, 30), 0.001)
        keep = np.ones(30, bool)
        keep[[5, 6]] = False
        b0 = series_from_mids("B", "2020-01-01", np.linspace(2, 1, 30), 0.001)
        b = FxSeries("B", b0.dates[keep], b0.bid[keep], b0.ask[keep])
        st = period_stats([a, b], "2020-01-01", years=0.05)
        # 0.05 years = 18 days; 16 common dates -> 15 returns
        n_common = 18 - 2
        _, mid = mid_rates(a)
        rows = np.flatnonzero(keep[:18])
        assert rows.size == n_common
        r = daily_returns(mid[rows])
        assert st.returns[0] == pytest.approx(r.mean() * 252, rel=1e-12)

    def test_missing_start_names_currency(self):
        a = series_from_mids("A", "2020-01-01", [1, 2, 3], 0.0)
        b = series_from_mids("LATE", "2020-02-01", [1, 2, 3], 0.0)
        with pytest.raises(QuboError, match="LATE"):
            period_stats([a, b], "2020-01-01", years=1.0)

    def test_too_short_names_currency(self):
        a = series_from_mids("SHORT", "2020-01-01", [1.0], 0.0)
        with pytest.raises(QuboError, match="SHORT"):
            period_stats([a], "2020-01-01", years=1.0)

    def test_model_units(self):
        st = PeriodStats(("A",), [5.0], [0.2], [[1.5]])
        r, c, C = st.model_units()
        assert (r[0], c[0], C[0, 0]) == (0.05, 0.002, 0.015)


class TestBundled:
    @pytest.mark.parametrize("period", list(Period))
    def test_checksum(self, period):
        raw = json.loads(bundled_path(period).read_text())
        canon = json.dumps({k: raw[k] for k in ("assets", "returns", "costs", "covariance")},
                           sort_keys=True, separators=(",", ":"))
        assert hashlib.sha256(canon.encode()).hexdigest() == CHECKSUMS[period.value]

    @pytest.mark.parametrize("period", list(Period))
    def test_symmetric_and_shaped(self, period):
        st = bundled_stats(period)
        assert len(st.assets) == 9 and st.assets[-1] == "Gold"
        assert np.array_equal(st.covariance, st.covariance.T)
        assert np.all(np.diag(st.covariance) > 0)

    def test_spot_values(self):
        gr = bundled_stats(Period.GREAT_RECESSION)
        assert gr.returns[gr.assets.index("SEK")] == 5.90
        assert gr.covariance[8, 8] == 3.87
        cv = bundled_stats("covid")
        assert cv.returns[cv.assets.index("JPY")] == -9.35

    def test_subset(self):
        dc = bundled_stats(Period.DEBT_CRISIS).subset(("AUD", "CAD", "Gold"))
        assert dc.covariance.tolist() == [[1.28, 0.87, 0.70], [0.87, 1.12, 0.65], [0.70, 0.65, 3.00]]
