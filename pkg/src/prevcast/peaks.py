"""High-prevalence period detection.

Candidate peaks are strict local maxima (leftmost index of a plateau);
each gets a topographic prominence, and a peak is retained when its
prominence strictly exceeds the chosen percentile of all candidate
prominences in the same series. Dimension-level detection averages the
gradients of the smoothed marker series first.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import LengthMismatchError, NotAPeakError, TooShortError
from .series import DailySeries, SmoothingSpec, gradient, rolling_mean

__all__ = [
    "Peak",
    "PeakSet",
    "find_candidate_peaks",
    "prominence",
    "select_peaks",
    "dimension_peaks",
    "combine_dimension_gradient",
]


@dataclass(frozen=True)
class Peak:
    index: int
    date: dt.date
    height: float
    prominence: float


@dataclass(frozen=True)
class PeakSet:
    """Retained peaks sorted by index; threshold is None when the series
    had no candidate peaks at all."""

    series_id: str
    peaks: tuple[Peak, ...]
    percentile_threshold: float | None

    def dates(self) -> list[dt.date]:
        return [p.date for p in self.peaks]


def find_candidate_peaks(s: DailySeries) -> list[int]:
    """Indices of strict local maxima.

    A plateau (run of equal values strictly above both neighbors) reports
    its leftmost index. Endpoints never qualify.
    """
    v = s.values
    n = v.size
    if n < 3:
        raise TooShortError("peak detection requires at least 3 points")
    out: list[int] = []
    i = 1
    while i < n - 1:
        if v[i] > v[i - 1]:
            j = i
            while j + 1 < n and v[j + 1] == v[i]:
                j += 1
            if j < n - 1 and v[i] > v[j + 1]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def prominence(s: DailySeries, peak_index: int) -> float:
    """Topographic prominence of a candidate peak.

    Walk outward on each side to the nearest strictly higher point (or
    the series end); the base on that side is the minimum value seen.
    Prominence is height minus the higher of the two bases.
    """
    v = s.values
    if peak_index not in find_candidate_peaks(s):
        raise NotAPeakError(f"index {peak_index} is not a candidate peak")
    h = v[peak_index]

    def base(step: int) -> float:
        lowest = np.inf
        i = peak_index + step
        while 0 <= i < v.size and v[i] <= h:
            lowest = min(lowest, v[i])
            i += step
        return lowest

    return float(h - max(base(-1), base(+1)))


def select_peaks(s: DailySeries, percentile: float = 80.0, series_id: str = "") -> PeakSet:
    """Retain candidate peaks whose prominence strictly exceeds the given
    percentile of the candidate-prominence population."""
    candidates = find_candidate_peaks(s)
    if not candidates:
        return PeakSet(series_id=series_id, peaks=(), percentile_threshold=None)
    proms = np.array([prominence(s, i) for i in candidates])
    threshold = float(np.quantile(proms, percentile / 100.0))
    kept = tuple(
        Peak(index=i, date=s.date_at(i), height=float(s.values[i]), prominence=float(p))
        for i, p in zip(candidates, proms)
        if p > threshold
    )
    return PeakSet(series_id=series_id, peaks=kept, percentile_threshold=threshold)


def combine_dimension_gradient(
    markers: Mapping[str, DailySeries],
    smoothing: SmoothingSpec = SmoothingSpec(),
) -> DailySeries:
    """Average of the per-marker gradients of the smoothed series."""
    if len(markers) < 2:
        raise LengthMismatchError("a dimension needs at least 2 marker series")
    items = list(markers.values())
    first = items[0]
    for s in items[1:]:
        if len(s) != len(first) or s.start_date != first.start_date:
            raise LengthMismatchError("marker series must share length and start date")
    grads = [gradient(rolling_mean(s, smoothing)).values for s in items]
    return DailySeries(first.start_date, np.mean(grads, axis=0))


def dimension_peaks(
    markers: Mapping[str, DailySeries],
    smoothing: SmoothingSpec = SmoothingSpec(),
    percentile: float = 80.0,
    series_id: str = "",
) -> PeakSet:
    """Peaks of the dimension gradient (smooth, differentiate, average,
    then percentile-filter by prominence)."""
    combined = combine_dimension_gradient(markers, smoothing)
    return select_peaks(combined, percentile=percentile, series_id=series_id)
