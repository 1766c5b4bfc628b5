"""Additive trend + weekly-seasonality forecaster.

A transparent stand-in for black-box additive regression forecasters:
piecewise-linear trend with three interior changepoints (slope changes
L2-penalized) plus order-3 weekly Fourier terms, fit jointly by ridge
least squares. Deterministic; no sampling.
"""

from __future__ import annotations

import numpy as np

from ..series import DailySeries
from .base import ForecastRun, ForecastSpec, forecast_series, origin_after, training_window

__all__ = ["fit_additive_forecast"]

_CHANGEPOINT_QUANTILES = (0.25, 0.5, 0.75)
_FOURIER_ORDER = 3
_WEEK = 7.0
_SLOPE_PENALTY = 0.5


def _design(t: np.ndarray, changepoints: np.ndarray) -> np.ndarray:
    cols = [np.ones_like(t), t]
    for c in changepoints:
        cols.append(np.maximum(t - c, 0.0))
    for k in range(1, _FOURIER_ORDER + 1):
        ang = 2.0 * np.pi * k * t / _WEEK
        cols.append(np.sin(ang))
        cols.append(np.cos(ang))
    return np.column_stack(cols)


def fit_additive_forecast(
    s: DailySeries, spec: ForecastSpec, marker: str = "series"
) -> ForecastRun:
    """Fit on the last ``spec.train_days`` points and extrapolate.

    Changepoints sit at the 25/50/75% positions of the training index;
    only the slope-change columns carry the ridge penalty, so an exact
    straight line or pure weekly signal is reproduced without shrinkage.
    """
    window = training_window(s, spec.train_days)
    from ..errors import InsufficientDataError

    n = len(window)
    if n < 8:
        raise InsufficientDataError("additive model needs at least 8 training points")

    t = np.arange(n, dtype=np.float64)
    changepoints = (n - 1) * np.asarray(_CHANGEPOINT_QUANTILES)
    x = _design(t, changepoints)
    # Ridge on the slope-change columns only, solved as an augmented
    # least-squares system so rank deficiency stays well-defined.
    n_cp = changepoints.size
    penalty = np.zeros((n_cp, x.shape[1]))
    penalty[:, 2 : 2 + n_cp] = np.sqrt(_SLOPE_PENALTY) * np.eye(n_cp)
    x_aug = np.vstack([x, penalty])
    y_aug = np.concatenate([window.values, np.zeros(n_cp)])
    beta, *_ = np.linalg.lstsq(x_aug, y_aug, rcond=None)

    t_future = np.arange(n, n + spec.horizon_days, dtype=np.float64)
    pred = _design(t_future, changepoints) @ beta

    origin = origin_after(s)
    return ForecastRun(
        origin_date=origin,
        spec=spec,
        predictions={marker: forecast_series(origin, pred, s.unit)},
        metadata={"strategy": "additive", "marker": marker, "changepoints": changepoints.tolist()},
    )
