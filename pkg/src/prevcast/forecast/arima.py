"""ARIMA forecasting via conditional sum of squares.

Differencing order comes from repeated stationarity checks (with an OLS
detrend tried before first-differencing); (p, q) come from an AIC grid.
Coefficients minimize the conditional sum of squared one-step residuals
with Nelder-Mead. Forecasts run the ARMA recursion with future shocks at
zero, then integrate/re-trend back to the original scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize

from .. import _kernels as kernels
from ..errors import InsufficientDataError, TooShortError
from ..series import DailySeries, linear_detrend, stationarity_check
from .base import ForecastRun, ForecastSpec, forecast_series, origin_after, training_window

__all__ = ["ArimaOrder", "fit_arima_forecast"]

_PQ_GRID = tuple((p, q) for p in range(4) for q in range(4))


@dataclass(frozen=True)
class ArimaOrder:
    """Fitted order and coefficients: x_t = c + sum(phi)·lags + sum(theta)·shocks."""

    p: int
    d: int
    q: int
    phi: tuple[float, ...]
    theta: tuple[float, ...]
    c: float

    def __post_init__(self):
        if len(self.phi) != self.p or len(self.theta) != self.q:
            raise ValueError("coefficient lengths must match (p, q)")

    def ar_is_stable(self) -> bool:
        """True when all AR polynomial roots lie outside the unit circle."""
        if self.p == 0:
            return True
        poly = np.concatenate(([1.0], -np.asarray(self.phi)))
        roots = np.roots(poly[::-1])  # roots of phi(z) in z
        return bool(np.all(np.abs(roots) > 1.0))


def _ols_ar_start(w: np.ndarray, p: int) -> np.ndarray:
    """OLS starting values [c, phi...] for the CSS optimizer."""
    if p == 0:
        return np.array([w.mean()])
    rows = w.size - p
    x = np.ones((rows, p + 1))
    for i in range(1, p + 1):
        x[:, i] = w[p - i : p - i + rows]
    beta, *_ = np.linalg.lstsq(x, w[p:], rcond=None)
    return beta


def _yule_walker(w: np.ndarray, p: int) -> tuple[np.ndarray, float]:
    """AR(p) coefficients from sample autocovariances (fallback path)."""
    mean = w.mean()
    wc = w - mean
    n = w.size
    acov = np.array([wc[: n - k] @ wc[k:] / n for k in range(p + 1)])
    if p == 0 or acov[0] == 0.0:
        return np.zeros(p), mean
    r_mat = np.array([[acov[abs(i - j)] for j in range(p)] for i in range(p)])
    try:
        phi = np.linalg.solve(r_mat, acov[1 : p + 1])
    except np.linalg.LinAlgError:
        phi = np.zeros(p)
    return phi, mean * (1.0 - phi.sum())


def _css_sse(w: np.ndarray, params: np.ndarray, p: int, q: int) -> float:
    c = params[0]
    e = kernels.arma_css_residuals(w, params[1 : 1 + p], params[1 + p :], c)
    sse = float(e[p:] @ e[p:])
    return sse if math.isfinite(sse) else 1e300


def _fit_css(w: np.ndarray, p: int, q: int) -> tuple[np.ndarray, float, bool]:
    """Minimize the conditional sum of squares; returns (params, sse, diverged)."""
    start = np.zeros(1 + p + q)
    start[: 1 + p] = _ols_ar_start(w, p)
    if p == 0 and q == 0:
        return start, _css_sse(w, start, p, q), False
    res = minimize(
        lambda params: _css_sse(w, params, p, q),
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 500, "maxfev": 2000},
    )
    params = np.asarray(res.x, dtype=np.float64)
    sse = _css_sse(w, params, p, q)
    diverged = not np.all(np.isfinite(params)) or sse >= 1e300
    return params, sse, diverged


def _select_difference(
    window: DailySeries, meta: dict[str, Any]
) -> tuple[np.ndarray, int, tuple[float, float] | None]:
    """Pick d in {0, 1, 2}, trying an OLS detrend before first-differencing.

    Returns (working series, d, optional (slope, intercept) of a removed
    trend). Windows too short for the stationarity test keep d = 0.
    """
    v = window.values
    try:
        if stationarity_check(window).is_stationary:
            return v, 0, None
        detrended, slope, intercept = linear_detrend(window)
        if stationarity_check(detrended).is_stationary:
            meta["detrended"] = True
            return detrended.values, 0, (slope, intercept)
        for d in (1, 2):
            diffed = np.diff(v, n=d)
            if diffed.size >= 10 and stationarity_check(
                DailySeries(window.start_date, diffed)
            ).is_stationary:
                return v, d, None
        meta["stationarity_unresolved"] = True
        return v, 1, None
    except TooShortError:
        meta["stationarity_skipped"] = True
        return v, 0, None


def _arma_forecast(
    w: np.ndarray, phi: np.ndarray, theta: np.ndarray, c: float, horizon: int
) -> np.ndarray:
    """ARMA recursion with future shocks set to zero."""
    p, q = phi.size, theta.size
    e = kernels.arma_css_residuals(w, phi, theta, c)
    hist = list(w)
    shocks = list(e)
    out = np.empty(horizon)
    for step in range(horizon):
        val = c
        for i in range(1, p + 1):
            val += phi[i - 1] * hist[-i]
        for j in range(1, q + 1):
            if len(shocks) - j >= 0:
                val += theta[j - 1] * shocks[-j]
        hist.append(val)
        shocks.append(0.0)
        out[step] = val
    return out


def fit_arima_forecast(
    s: DailySeries,
    spec: ForecastSpec,
    order: tuple[int, int, int] | None = None,
    marker: str = "series",
) -> ForecastRun:
    """Fit on the last ``spec.train_days`` points and predict the horizon.

    ``order`` forces (p, d, q) and skips both the stationarity gate and
    the AIC grid. Falls back to a Yule-Walker AR fit (flagged in run
    metadata) if the optimizer diverges.
    """
    window = training_window(s, spec.train_days)
    meta: dict[str, Any] = {"strategy": "arima", "marker": marker}
    trend: tuple[float, float] | None = None

    if order is not None:
        p, d, q = order
        work = window.values
        if spec.train_days < p + d + q + 2:
            raise InsufficientDataError(
                f"window of {spec.train_days} cannot fit order {order}"
            )
    else:
        work, d, trend = _select_difference(window, meta)
        p = q = -1  # chosen below

    levels = [np.asarray(work, dtype=np.float64)]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    w = levels[-1]

    if order is not None:
        candidates = [(p, q)]
    else:
        candidates = [
            (p_, q_)
            for p_, q_ in _PQ_GRID
            if spec.train_days >= p_ + d + q_ + 2 and w.size - p_ >= p_ + q_ + 2
        ]
        if not candidates:
            raise InsufficientDataError(
                f"no ARIMA order is feasible on a window of {spec.train_days}"
            )

    best: tuple[float, tuple[int, int], np.ndarray, bool] | None = None
    for p_, q_ in candidates:
        if w.size <= p_:
            continue
        params, sse, diverged = _fit_css(w, p_, q_)
        n_eff = w.size - p_
        aic = n_eff * math.log(max(sse, 1e-300) / n_eff) + 2 * (p_ + q_ + 2)
        if best is None or aic < best[0]:
            best = (aic, (p_, q_), params, diverged)
    if best is None:
        raise InsufficientDataError("training window exhausted by differencing")

    _, (p, q), params, diverged = best
    if diverged:
        phi, c = _yule_walker(w, p)
        theta = np.zeros(q)
        meta["fallback"] = "yule_walker_ar"
    else:
        c = float(params[0])
        phi = np.asarray(params[1 : 1 + p])
        theta = np.asarray(params[1 + p :])

    fitted = ArimaOrder(p=p, d=d, q=q, phi=tuple(phi), theta=tuple(theta), c=c)
    if not fitted.ar_is_stable():
        warnings.warn(
            f"fitted AR polynomial for {marker!r} has roots on or inside the unit circle",
            RuntimeWarning,
            stacklevel=2,
        )
        meta["ar_unstable"] = True
    meta["order"] = (p, d, q)

    pred = _arma_forecast(w, phi, theta, c, spec.horizon_days)
    # Integrate the differences back, innermost level first.
    for level in reversed(levels[:-1]):
        pred = level[-1] + np.cumsum(pred)
    if trend is not None:
        slope, intercept = trend
        t_future = np.arange(len(window), len(window) + spec.horizon_days)
        pred = pred + slope * t_future + intercept

    origin = origin_after(s)
    meta["model"] = fitted
    return ForecastRun(
        origin_date=origin,
        spec=spec,
        predictions={marker: forecast_series(origin, pred, s.unit)},
        metadata=meta,
    )
