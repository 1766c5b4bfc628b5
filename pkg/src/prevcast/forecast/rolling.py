"""Rolling-origin backtesting driver.

For each origin t (stepping by ``stride``) the driver hands every series'
history up to t to the strategy and collects the horizon predictions.
Univariate strategies are applied per marker; multivariate ones see the
whole dict at once.
"""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

from ..errors import InsufficientDataError
from ..series import DailySeries
from .additive import fit_additive_forecast
from .arima import fit_arima_forecast
from .base import ForecastRun, ForecastSpec, check_aligned, forecast_series, origin_after
from .gru import fit_gru_forecast
from .var import fit_var_forecast

__all__ = ["STRATEGIES", "rolling_forecast"]

StrategyFn = Callable[[Mapping[str, DailySeries], ForecastSpec], ForecastRun]


def _univariate(fit_one) -> StrategyFn:
    def run_all(ms: Mapping[str, DailySeries], spec: ForecastSpec) -> ForecastRun:
        predictions = {}
        metadata = {"per_marker": {}}
        origin = None
        for marker, series in ms.items():
            run = fit_one(series, spec, marker=marker)
            predictions.update(run.predictions)
            metadata["per_marker"][marker] = run.metadata
            origin = run.origin_date
        return ForecastRun(origin_date=origin, spec=spec, predictions=predictions, metadata=metadata)

    return run_all


def _naive(ms: Mapping[str, DailySeries], spec: ForecastSpec) -> ForecastRun:
    """Repeat the last observed value; baseline for sanity checks."""
    origin = origin_after(next(iter(ms.values())))
    predictions = {
        m: forecast_series(origin, np.full(spec.horizon_days, s.values[-1]), s.unit)
        for m, s in ms.items()
    }
    return ForecastRun(origin_date=origin, spec=spec, predictions=predictions,
                       metadata={"strategy": "naive"})


STRATEGIES: dict[str, StrategyFn] = {
    "arima": _univariate(fit_arima_forecast),
    "additive": _univariate(fit_additive_forecast),
    "var": fit_var_forecast,
    "gru": fit_gru_forecast,
    "naive": _naive,
}


def rolling_forecast(
    ms: Mapping[str, DailySeries],
    spec: ForecastSpec,
    stride: int = 1,
    strategy_fn: StrategyFn | None = None,
) -> list[ForecastRun]:
    """Fit-and-predict at every origin from train_days to len - horizon.

    Each strategy receives the full history before the origin (it slices
    its own training window); runs come back in origin order. Origins a
    strategy cannot serve (e.g. the GRU needs train_days + 1 points of
    history, one more than the first origin offers) are skipped; if no
    origin is feasible the error propagates.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    check_aligned(ms)
    length = len(next(iter(ms.values())))
    if length < spec.train_days + spec.horizon_days:
        raise InsufficientDataError(
            f"series of length {length} cannot hold train_days={spec.train_days} "
            f"plus horizon_days={spec.horizon_days}"
        )
    fn = strategy_fn or STRATEGIES[spec.strategy]
    runs = []
    last_error: InsufficientDataError | None = None
    for origin in range(spec.train_days, length - spec.horizon_days + 1, stride):
        history = {m: s.slice(0, origin) for m, s in ms.items()}
        try:
            runs.append(fn(history, spec))
        except InsufficientDataError as exc:
            last_error = exc
    if not runs and last_error is not None:
        raise last_error
    return runs
