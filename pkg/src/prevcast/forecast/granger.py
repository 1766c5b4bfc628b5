"""Granger causality: does x's past improve the prediction of y?

Classic restricted-vs-unrestricted F-test: regress y on its own lags,
then add x's lags, and compare residual sums of squares.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import LengthMismatchError, TooShortError
from ..series import DailySeries
from ..stats import f_sf

__all__ = ["GrangerResult", "granger_causality"]


class GrangerResult(NamedTuple):
    F: float
    p_value: float


def granger_causality(x: DailySeries, y: DailySeries, max_lag: int) -> GrangerResult:
    """Test whether lags 1..max_lag of ``x`` help predict ``y``.

    The F statistic has (max_lag, n_obs - 2*max_lag - 1) degrees of
    freedom, where n_obs is the number of regression rows.
    """
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if len(x) != len(y):
        raise LengthMismatchError("series must have equal length")
    n = len(y)
    if n <= 3 * max_lag:
        raise TooShortError(f"need more than {3 * max_lag} points for max_lag={max_lag}")

    xv, yv = x.values, y.values
    rows = n - max_lag
    target = yv[max_lag:]
    own_lags = np.column_stack(
        [np.ones(rows)] + [yv[max_lag - i : n - i] for i in range(1, max_lag + 1)]
    )
    cross_lags = np.column_stack(
        [xv[max_lag - i : n - i] for i in range(1, max_lag + 1)]
    )

    def ssr(design: np.ndarray) -> float:
        beta, *_ = np.linalg.lstsq(design, target, rcond=None)
        resid = target - design @ beta
        return float(resid @ resid)

    ssr_restricted = ssr(own_lags)
    ssr_unrestricted = ssr(np.hstack([own_lags, cross_lags]))
    df2 = rows - 2 * max_lag - 1
    if df2 < 1:
        raise TooShortError("not enough observations for the unrestricted regression")
    if ssr_unrestricted <= 0.0:
        return GrangerResult(F=np.inf, p_value=0.0)
    f_stat = ((ssr_restricted - ssr_unrestricted) / max_lag) / (ssr_unrestricted / df2)
    f_stat = max(f_stat, 0.0)
    return GrangerResult(F=f_stat, p_value=f_sf(f_stat, max_lag, df2))
