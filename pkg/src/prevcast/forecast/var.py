"""Vector autoregression: joint linear model over all markers.

Non-stationary series are OLS-detrended first. The lag order is chosen by
AIC on a common sample; coefficients are per-equation least squares with
a ridge fallback when the design is collinear. Forecasts iterate the
fitted recursion and re-add removed trends.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from ..errors import InsufficientDataError, TooShortError
from ..series import DailySeries, linear_detrend, stationarity_check
from .base import (
    ForecastRun,
    ForecastSpec,
    check_aligned,
    forecast_series,
    origin_after,
    training_window,
)

__all__ = ["VarModel", "fit_var_forecast"]

_MAX_LAG = 4
_RIDGE_LAMBDA = 1e-6
_COND_LIMIT = 1e10


@dataclass(frozen=True)
class VarModel:
    """y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + e_t."""

    k: int
    p: int
    coef: tuple[np.ndarray, ...]  # p matrices of shape (k, k)
    intercept: np.ndarray  # (k,)
    residual_cov: np.ndarray  # (k, k)
    spectral_radius: float

    def __post_init__(self):
        if len(self.coef) != self.p or any(a.shape != (self.k, self.k) for a in self.coef):
            raise ValueError("coefficient matrices must be p matrices of shape (k, k)")


def _lag_design(data: np.ndarray, p: int, offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows [1, y_{t-1}, ..., y_{t-p}] -> y_t for t = offset..T-1."""
    t_len, k = data.shape
    rows = t_len - offset
    x = np.ones((rows, 1 + k * p))
    for lag in range(1, p + 1):
        x[:, 1 + (lag - 1) * k : 1 + lag * k] = data[offset - lag : t_len - lag]
    return x, data[offset:]

def _spectral_radius(coef: tuple[np.ndarray, ...], k: int, p: int) -> float:
    companion = np.zeros((k * p, k * p))
    for i, a in enumerate(coef):
        companion[:k, i * k : (i + 1) * k] = a
    if p > 1:
        companion[k:, : k * (p - 1)] = np.eye(k * (p - 1))
    return float(np.abs(np.linalg.eigvals(companion)).max())


def fit_var_forecast(
    ms: Mapping[str, DailySeries],
    spec: ForecastSpec,
    diagonal_only: bool = False,
    max_lag: int = _MAX_LAG,
) -> ForecastRun:
    """Fit a VAR on the aligned training windows of ``ms`` and predict.

    The lag order is chosen by AIC over 1..min(max_lag, feasible).
    ``diagonal_only`` constrains every cross-series coefficient to zero,
    reducing each equation to an AR fit of the same lag; it exists as a
    diagnostic for comparing against univariate fits.
    """
    markers = list(ms)
    if len(markers) < 2:
        raise InsufficientDataError("VAR needs at least 2 series; use arima for univariate")
    check_aligned(ms)
    windows = {m: training_window(ms[m], spec.train_days) for m in markers}
    k = len(markers)
    t_len = spec.train_days

    meta: dict[str, Any] = {"strategy": "var", "markers": markers}
    trends: dict[str, tuple[float, float]] = {}
    cols = []
    for m in markers:
        w = windows[m]
        try:
            if not stationarity_check(w).is_stationary:
                w, slope, intercept = linear_detrend(w)
                trends[m] = (slope, intercept)
        except TooShortError:
            meta["stationarity_skipped"] = True
        cols.append(w.values)
    data = np.column_stack(cols)
    if trends:
        meta["detrended_markers"] = sorted(trends)

    feasible = [
        p
        for p in range(1, max(1, max_lag) + 1)
        if t_len > k * p + 1 and t_len - p >= k * p + 2
    ]
    if not feasible:
        raise InsufficientDataError(
            f"no VAR lag order feasible with k={k}, window={t_len}"
        )

    # Lag selection on the common sample that all candidates share.
    p_max = max(feasible)
    best_p, best_aic = feasible[0], math.inf
    for p in feasible:
        x, y = _lag_design(data, p, offset=p_max)
        beta, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ beta
        t_eff = y.shape[0]
        sigma = resid.T @ resid / t_eff
        sign, logdet = np.linalg.slogdet(sigma)
        aic = math.inf if sign <= 0 else logdet + 2.0 * (p * k * k + k) / t_eff
        if aic < best_aic:
            best_p, best_aic = p, aic
    meta["lag_order"] = best_p

    x, y = _lag_design(data, best_p, offset=best_p)
    if diagonal_only:
        beta = np.zeros((1 + k * best_p, k))
        for j in range(k):
            own = [0] + [1 + (lag - 1) * k + j for lag in range(1, best_p + 1)]
            sub = x[:, own]
            coefs, *_ = np.linalg.lstsq(sub, y[:, j], rcond=None)
            beta[own, j] = coefs
        resid = y - x @ beta
    elif np.linalg.cond(x) > _COND_LIMIT:
        # Collinear design: ridge in column-standardized space, so the
        # penalty is a relative shrinkage (an absolute lambda would crush
        # coefficients whenever the data happens to be small-valued).
        meta["fallback"] = "ridge"
        scale = np.sqrt(np.mean(x * x, axis=0))
        scale[scale == 0.0] = 1.0
        xs = x / scale
        gram = xs.T @ xs + _RIDGE_LAMBDA * np.eye(x.shape[1])
        beta = np.linalg.solve(gram, xs.T @ y) / scale[:, None]
        resid = y - x @ beta
    else:
        beta, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ beta

    dof = max(y.shape[0] - (1 + k * best_p), 1)
    coef = tuple(
        beta[1 + (lag - 1) * k : 1 + lag * k, :].T.copy() for lag in range(1, best_p + 1)
    )
    radius = _spectral_radius(coef, k, best_p)
    if radius >= 1.0:
        warnings.warn(
            f"VAR companion spectral radius {radius:.3f} >= 1 (explosive fit)",
            RuntimeWarning,
            stacklevel=2,
        )
    model = VarModel(
        k=k,
        p=best_p,
        coef=coef,
        intercept=beta[0, :].copy(),
        residual_cov=resid.T @ resid / dof,
        spectral_radius=radius,
    )
    meta["model"] = model

    hist = [data[i] for i in range(t_len)]
    preds = np.empty((spec.horizon_days, k))
    for step in range(spec.horizon_days):
        val = model.intercept.copy()
        for lag in range(1, best_p + 1):
            val += model.coef[lag - 1] @ hist[-lag]
        hist.append(val)
        preds[step] = val

    origin = origin_after(next(iter(ms.values())))
    out: dict[str, DailySeries] = {}
    for j, m in enumerate(markers):
        vals = preds[:, j]
        if m in trends:
            slope, intercept = trends[m]
            t_future = np.arange(t_len, t_len + spec.horizon_days)
            vals = vals + slope * t_future + intercept
        out[m] = forecast_series(origin, vals, ms[m].unit)
    return ForecastRun(origin_date=origin, spec=spec, predictions=out, metadata=meta)
