"""
From daily quotes to portfolio statistics
=========================================

A synthetic pair of bid/ask series shows what ``period_stats`` computes,
followed by the bundled statistics of the three historical periods.
"""

# %%
import numpy as np

from qubofolio.marketdata import FxSeries, Period, bundled_stats, period_stats

days = np.arange("2021-01-01", "2021-04-01", dtype="datetime64[D]")
rng = np.random.default_rng(7)
mid_a = 17.0 * np.exp(np.cumsum(rng.normal(0, 0.004, days.size)))
mid_b = 25.0 * np.exp(np.cumsum(rng.normal(0, 0.006, days.size)))
series = [
    FxSeries("AAA", days, mid_a * 0.999, mid_a * 1.001),
    FxSeries("BBB", days, mid_b * 0.998, mid_b * 1.002),
]
st = period_stats(series, "2021-01-01", years=0.25, label="synthetic")
print("annualized returns %:", np.round(st.returns, 2))
print("relative spreads  %:", np.round(st.costs, 3))
print("covariance:\n", np.round(st.covariance, 3))

# %%
for period in Period:
    s = bundled_stats(period)
    vol = np.sqrt(np.diag(s.covariance))
    print(f"{period.value:15s} top return {s.assets[int(np.argmax(s.returns))]:5s} "
          f"lowest volatility {s.assets[int(np.argmin(vol))]}")
