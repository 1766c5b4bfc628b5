"""Time-series primitives: smoothing, gradients, stationarity, scaling.

The central type is :class:`DailySeries`, a gap-free run of daily values
anchored at a calendar date. Everything downstream (peak detection,
forecasting, evaluation) consumes and produces this type.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooShortError
from .stats import norm_cdf

__all__ = [
    "DailySeries",
    "SmoothingSpec",
    "StationarityReport",
    "RobustScaleParams",
    "rolling_mean",
    "gradient",
    "stationarity_check",
    "linear_detrend",
    "robust_normalize",
]

ONE_DAY = dt.timedelta(days=1)


@dataclass(frozen=True, eq=False)
class DailySeries:
    """A contiguous sequence of real values, one per calendar day.

    ``values[k]`` corresponds to ``start_date + k`` days. Values are
    stored as a read-only float64 array and must be finite; gap handling
    happens upstream (see ``lexicon.daily_prevalence``).
    """

    start_date: dt.date
    values: np.ndarray
    unit: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("DailySeries requires a non-empty 1-d value array")
        if not np.all(np.isfinite(v)):
            raise ValueError("DailySeries values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end_date(self) -> dt.date:
        return self.start_date + (len(self) - 1) * ONE_DAY

    def date_at(self, index: int) -> dt.date:
        if not 0 <= index < len(self):
            raise IndexError(index)
        return self.start_date + index * ONE_DAY

    def index_of(self, date: dt.date) -> int:
        offset = (date - self.start_date).days
        if not 0 <= offset < len(self):
            raise IndexError(f"{date} outside series range")
        return offset

    def dates(self) -> list[dt.date]:
        return [self.start_date + k * ONE_DAY for k in range(len(self))]

    def slice(self, start: int, stop: int) -> "DailySeries":
        """Sub-series over value indices [start, stop)."""
        if not (0 <= start < stop <= len(self)):
            raise IndexError(f"invalid slice [{start}, {stop})")
        return DailySeries(self.start_date + start * ONE_DAY, self.values[start:stop], self.unit)

    def with_values(self, values, unit: str | None = None) -> "DailySeries":
        """Same start date, new values (must keep the same length)."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != self.values.shape:
            raise ValueError("with_values must preserve length")
        return DailySeries(self.start_date, values, self.unit if unit is None else unit)


@dataclass(frozen=True)
class SmoothingSpec:
    """Trailing moving-average window, in days."""

    window_days: int = 7
    alignment: str = "trailing"

    def __post_init__(self):
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")
        if self.alignment != "trailing":
            raise ValueError("only trailing alignment is supported")


@dataclass(frozen=True)
class StationarityReport:
    statistic: float
    p_value: float
    is_stationary: bool
    lags_used: int


@dataclass(frozen=True)
class RobustScaleParams:
    """Median/IQR scaling parameters; the divisor falls back to 1 when IQR is 0."""

    median: float
    iqr: float

    @property
    def divisor(self) -> float:
        return self.iqr if self.iqr > 0.0 else 1.0

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (np.asarray(values, dtype=np.float64) - self.median) / self.divisor

    def invert(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=np.float64) * self.divisor + self.median


def rolling_mean(s: DailySeries, spec: SmoothingSpec = SmoothingSpec()) -> DailySeries:
    """Trailing moving average with an expanding prefix.

    ``out[t]`` is the mean of ``s[max(0, t-w+1) .. t]``, so the first
    ``w-1`` outputs average over however many observations exist. Output
    has the same length and start date as the input.
    """
    v = s.values
    w = spec.window_days
    csum = np.concatenate(([0.0], np.cumsum(v)))
    t = np.arange(v.size)
    lo = np.maximum(0, t - w + 1)
    out = (csum[t + 1] - csum[lo]) / (t + 1 - lo)
    return s.with_values(out)


def gradient(s: DailySeries) -> DailySeries:
    """Day-over-day gradient: central differences inside, one-sided at the ends."""
    if len(s) < 2:
        raise TooShortError("gradient requires at least 2 points")
    return s.with_values(np.gradient(s.values), unit=f"{s.unit}/day" if s.unit else "")


# --- Augmented Dickey-Fuller -------------------------------------------------

# MacKinnon (1994, 2010) regression-surface coefficients for the
# constant-only test on a single series. p = Phi(polynomial(tau)), with a
# separate polynomial on each side of tau_star and hard caps outside
# [tau_min, tau_max].
_ADF_TAU_STAR = -1.61
_ADF_TAU_MIN = -18.83
_ADF_TAU_MAX = 2.74
_ADF_SMALLP = (2.1659, 1.4412, 0.038269)
_ADF_LARGEP = (1.7339, 0.93202, -0.12745, -0.010368)


def _adf_pvalue(tau: float) -> float:
    if tau > _ADF_TAU_MAX:
        return 1.0
    if tau < _ADF_TAU_MIN:
        return 0.0
    coefs = _ADF_SMALLP if tau <= _ADF_TAU_STAR else _ADF_LARGEP
    arg = sum(c * tau**k for k, c in enumerate(coefs))
    return norm_cdf(arg)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares fit returning (coefficients, residual sum of squares)."""
    beta, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    return beta, float(resid @ resid)


def _adf_regression(v: np.ndarray, lag: int, offset: int) -> tuple[float, int]:
    """ADF t-statistic on level coefficient with `lag` difference terms.

    ``offset`` discards extra leading rows so that candidate lag orders can
    be compared on a common sample. Returns (tau, number of observations).
    """
    dv = np.diff(v)
    start = offset
    y = dv[start:]
    nobs = y.size
    cols = [np.ones(nobs), v[start : start + nobs]]
    for i in range(1, lag + 1):
        cols.append(dv[start - i : start - i + nobs])
    x = np.column_stack(cols)
    beta, ssr = _ols(x, y)
    dof = nobs - x.shape[1]
    sigma2 = ssr / dof
    xtx_inv = np.linalg.pinv(x.T @ x)
    se = math.sqrt(sigma2 * xtx_inv[1, 1])
    return float(beta[1] / se), nobs


def stationarity_check(s: DailySeries, alpha: float = 0.05) -> StationarityReport:
    """Augmented Dickey-Fuller unit-root test with a constant term.

    The lag order is chosen by AIC over 0..floor((n-1)^(1/3)) on a common
    sample, then the statistic is recomputed with the chosen lag on the
    full usable sample. ``is_stationary`` is true when the unit-root null
    is rejected at ``alpha``.
    """
    v = s.values
    n = v.size
    if n < 10:
        raise TooShortError("stationarity_check requires at least 10 points")
    max_lag = int(math.floor((n - 1) ** (1.0 / 3.0)))
    max_lag = min(max_lag, n - 4)  # keep positive degrees of freedom

    dv = np.diff(v)
    best_lag, best_aic = 0, math.inf
    for lag in range(0, max_lag + 1):
        # Common sample: all candidates drop the first max_lag differences.
        y = dv[max_lag:]
        nobs = y.size
        cols = [np.ones(nobs), v[max_lag : max_lag + nobs]]
        for i in range(1, lag + 1):
            cols.append(dv[max_lag - i : max_lag - i + nobs])
        x = np.column_stack(cols)
        _, ssr = _ols(x, y)
        if ssr <= 0.0:
            ssr = 1e-300
        aic = nobs * math.log(ssr / nobs) + 2 * x.shape[1]
        if aic < best_aic:
            best_lag, best_aic = lag, aic

    tau, _ = _adf_regression(v, best_lag, offset=best_lag)
    p = _adf_pvalue(tau)
    return StationarityReport(
        statistic=tau, p_value=p, is_stationary=p < alpha, lags_used=best_lag
    )


def linear_detrend(s: DailySeries) -> tuple[DailySeries, float, float]:
    """Subtract the OLS line fit over t = 0..n-1.

    Returns (residual series, slope, intercept) so that forecasts computed
    on the residuals can be re-trended later.
    """
    if len(s) < 2:
        raise TooShortError("linear_detrend requires at least 2 points")
    t = np.arange(len(s), dtype=np.float64)
    slope, intercept = np.polyfit(t, s.values, 1)
    resid = s.values - (slope * t + intercept)
    return s.with_values(resid), float(slope), float(intercept)


def robust_normalize(s: DailySeries) -> tuple[DailySeries, RobustScaleParams]:
    """Quartile-based scaling: (x - median) / IQR.

    Quantiles use linear interpolation between order statistics (the
    h = (n-1)q rule). A zero IQR falls back to a divisor of 1 so constant
    series map to all zeros.
    """
    v = s.values
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
    params = RobustScaleParams(median=float(med), iqr=float(q3 - q1))
    return s.with_values(params.apply(v), unit=""), params
