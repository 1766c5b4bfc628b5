"""Shared forecasting contract: spec, run container, seed derivation.

Every strategy consumes the history available up to an origin date and
produces per-marker predictions for the following horizon. Strategies
slice their own training window (the last ``train_days`` points) from
that history; the GRU additionally uses the earlier history as extra
training sequences.
"""

from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..errors import LengthMismatchError
from ..series import ONE_DAY, DailySeries

KNOWN_STRATEGIES = ("arima", "additive", "var", "gru", "naive")


@dataclass(frozen=True)
class ForecastSpec:
    """How to fit and how far to predict.

    ``train_days`` is 7, 14 or 21 in the standard sweep but any value
    >= 2 is accepted. ``naive`` (predict the last observed value) exists
    as a baseline for tests and benchmarks.
    """

    strategy: str = "arima"
    train_days: int = 7
    horizon_days: int = 7
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in KNOWN_STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.train_days < 2:
            raise ValueError("train_days must be >= 2")
        if self.horizon_days < 1:
            raise ValueError("horizon_days must be >= 1")


@dataclass(frozen=True)
class ForecastRun:
    """Per-marker predictions starting at ``origin_date``."""

    origin_date: dt.date
    spec: ForecastSpec
    predictions: dict[str, DailySeries]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for marker, series in self.predictions.items():
            if series.start_date != self.origin_date:
                raise LengthMismatchError(
                    f"prediction for {marker!r} starts at {series.start_date}, "
                    f"expected {self.origin_date}"
                )
            if len(series) != self.spec.horizon_days:
                raise LengthMismatchError(
                    f"prediction for {marker!r} has length {len(series)}, "
                    f"expected {self.spec.horizon_days}"
                )


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed derived from a base seed and arbitrary labels.

    Uses SHA-256 so the value is identical across processes and runs
    (unlike Python's salted ``hash``); this is what keeps parallel rolling
    forecasts reproducible.
    """
    digest = hashlib.sha256()
    digest.update(str(int(base_seed)).encode())
    for part in parts:
        digest.update(b"|")
        digest.update(str(part).encode())
    return int.from_bytes(digest.digest()[:8], "little")


def check_aligned(ms: Mapping[str, DailySeries]) -> tuple[dt.date, int]:
    """Validate equal length and start date; returns (start_date, length)."""
    if not ms:
        raise ValueError("no series given")
    items = list(ms.values())
    first = items[0]
    for s in items[1:]:
        if len(s) != len(first) or s.start_date != first.start_date:
            raise LengthMismatchError("marker series must share length and start date")
    return first.start_date, len(first)


def training_window(s: DailySeries, train_days: int) -> DailySeries:
    """The last ``train_days`` observations of ``s``."""
    from ..errors import InsufficientDataError

    if len(s) < train_days:
        raise InsufficientDataError(
            f"need {train_days} observations, have {len(s)}"
        )
    return s.slice(len(s) - train_days, len(s))


def forecast_series(origin: dt.date, values: np.ndarray, unit: str = "") -> DailySeries:
    return DailySeries(origin, np.asarray(values, dtype=np.float64), unit)


def origin_after(s: DailySeries) -> dt.date:
    """First forecast day: the day after the last observation."""
    return s.end_date + ONE_DAY
