"""Forecasting strategies behind one contract, plus the rolling driver."""

from .additive import fit_additive_forecast
from .arima import ArimaOrder, fit_arima_forecast
from .base import ForecastRun, ForecastSpec, derive_seed
from .granger import GrangerResult, granger_causality
from .gru import GruConfig, GruParams, fit_gru_forecast
from .rolling import STRATEGIES, rolling_forecast
from .var import VarModel, fit_var_forecast

__all__ = [
    "ForecastSpec",
    "ForecastRun",
    "ArimaOrder",
    "VarModel",
    "GruParams",
    "GruConfig",
    "GrangerResult",
    "STRATEGIES",
    "derive_seed",
    "fit_arima_forecast",
    "fit_additive_forecast",
    "fit_var_forecast",
    "fit_gru_forecast",
    "granger_causality",
    "rolling_forecast",
]
