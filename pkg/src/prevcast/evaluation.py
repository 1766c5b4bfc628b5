"""Forecast-quality metrics and the statistical comparison protocol.

MAPE over non-zero actuals, peak hit rate (recall over actual peaks,
±n-day windows or same-ISO-week matching), normality-gated paired
comparison (t-test or Wilcoxon signed-rank) with Cohen's d_z effect
sizes, and the splicing rule that extracts predicted peaks from rolling
forecasts.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AllZeroActualsError,
    LengthMismatchError,
    NoActualPeaksError,
)
from .forecast.base import ForecastRun
from .peaks import Peak, PeakSet, dimension_peaks
from .series import DailySeries, SmoothingSpec
from .stats import cohens_dz, paired_t_test, shapiro_wilk, wilcoxon_signed_rank

__all__ = [
    "MapeResult",
    "HitWindow",
    "CompareResult",
    "mape",
    "hit_rate",
    "day_window_hit_rate",
    "normality_test",
    "paired_compare",
    "spliced_dimension_peaks",
    "rolling_mape",
]

_NORMALITY_GATE = 0.05
_SIGNIFICANCE = 0.01


@dataclass(frozen=True)
class MapeResult:
    """Mean/std of absolute percentage errors over non-zero actuals.

    ``std`` is the population standard deviation of the pointwise APEs
    (so a single point gives 0), and ``n_excluded_zero`` counts the
    zero-actual points that were skipped.
    """

    mean: float
    std: float
    n_points: int
    n_excluded_zero: int


@dataclass(frozen=True)
class HitWindow:
    """Matching window for peak hits.

    The protocol windows are n = 2 and 3 as ±n-day matching, and n = 7 as
    same-ISO-week matching ("the enclosing week"), which is what the
    invariant mode == iso_week <=> n == 7 encodes. For exploratory day
    windows at other widths, see :func:`day_window_hit_rate`.
    """

    n: int
    mode: str = ""

    def __post_init__(self):
        if self.n not in (2, 3, 7):
            raise ValueError("protocol windows use n in {2, 3, 7}")
        mode = self.mode or ("iso_week" if self.n == 7 else "day_window")
        if mode not in ("day_window", "iso_week"):
            raise ValueError(f"unknown mode {mode!r}")
        if (mode == "iso_week") != (self.n == 7):
            raise ValueError("iso_week matching is defined exactly for n == 7")
        object.__setattr__(self, "mode", mode)


@dataclass(frozen=True)
class CompareResult:
    test_used: str  # "paired_t" | "wilcoxon"
    p_value: float
    cohens_d: float
    significant: bool

    def __post_init__(self):
        if self.significant != (self.p_value < _SIGNIFICANCE):
            raise ValueError("significant must equal p_value < 0.01")


def mape(actual: DailySeries, forecast: DailySeries) -> MapeResult:
    """Mean absolute percentage error; zero-actual points are excluded."""
    if len(actual) != len(forecast):
        raise LengthMismatchError("actual and forecast must have equal length")
    a = actual.values
    f = forecast.values
    nonzero = a != 0.0
    n_excluded = int((~nonzero).sum())
    if not nonzero.any():
        raise AllZeroActualsError("every actual value is zero")
    ape = 100.0 * np.abs(a[nonzero] - f[nonzero]) / np.abs(a[nonzero])
    return MapeResult(
        mean=float(ape.mean()),
        std=float(ape.std()),
        n_points=int(nonzero.sum()),
        n_excluded_zero=n_excluded,
    )


def _iso_week(d: dt.date) -> tuple[int, int]:
    iso = d.isocalendar()
    return iso[0], iso[1]


def day_window_hit_rate(
    actual_dates: Sequence[dt.date], predicted_dates: Sequence[dt.date], n: int
) -> float:
    """Recall over actual peak dates with a ±n-day matching window."""
    if not actual_dates:
        raise NoActualPeaksError("hit rate undefined without actual peaks")
    hits = sum(
        1
        for a in actual_dates
        if any(abs((a - p).days) <= n for p in predicted_dates)
    )
    return hits / len(actual_dates)


def hit_rate(actual_peaks: PeakSet, predicted_peaks: PeakSet, w: HitWindow) -> float:
    """Fraction of actual peaks matched by at least one predicted peak."""
    actual_dates = actual_peaks.dates()
    if not actual_dates:
        raise NoActualPeaksError("hit rate undefined without actual peaks")
    predicted_dates = predicted_peaks.dates()
    if w.mode == "day_window":
        return day_window_hit_rate(actual_dates, predicted_dates, w.n)
    predicted_weeks = {_iso_week(p) for p in predicted_dates}
    hits = sum(1 for a in actual_dates if _iso_week(a) in predicted_weeks)
    return hits / len(actual_dates)


def normality_test(sample: Sequence[float]) -> float:
    """Shapiro-Wilk p-value; requires 8 <= n <= 5000."""
    n = len(sample)
    if n < 8:
        raise LengthMismatchError("normality_test requires at least 8 observations")
    if n > 5000:
        raise LengthMismatchError("normality_test supports at most 5000 observations")
    _, p = shapiro_wilk(np.asarray(sample, dtype=np.float64))
    return p


def paired_compare(a: Sequence[float], b: Sequence[float]) -> CompareResult:
    """Compare two paired samples with the normality-gated protocol.

    Differences that pass Shapiro-Wilk at 0.05 go to the paired t-test,
    anything else to the Wilcoxon signed-rank test (exact for small
    untied samples). Significance is judged at p < 0.01; the effect size
    is Cohen's d_z. All-zero differences short-circuit to p = 1.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.shape != bv.shape:
        raise LengthMismatchError("paired samples must have equal length")
    if av.size < 8:
        raise LengthMismatchError("paired_compare requires at least 8 pairs")
    d = av - bv
    if np.all(d == 0.0):
        return CompareResult(test_used="wilcoxon", p_value=1.0, cohens_d=0.0, significant=False)
    effect = cohens_dz(d)
    if d.std(ddof=1) == 0.0:
        # Constant nonzero differences: normality is undefined, the exact
        # signed-rank test still applies.
        _, p, _ = wilcoxon_signed_rank(d)
        return CompareResult("wilcoxon", p, effect, p < _SIGNIFICANCE)
    if normality_test(d) >= _NORMALITY_GATE:
        _, p = paired_t_test(d)
        return CompareResult("paired_t", p, effect, p < _SIGNIFICANCE)
    _, p, _ = wilcoxon_signed_rank(d)
    return CompareResult("wilcoxon", p, effect, p < _SIGNIFICANCE)


# --- Peaks from rolling forecasts -------------------------------------------


def spliced_dimension_peaks(
    actual: Mapping[str, DailySeries],
    runs: Iterable[ForecastRun],
    smoothing: SmoothingSpec = SmoothingSpec(),
    percentile: float = 80.0,
    series_id: str = "",
) -> PeakSet:
    """Predicted peaks: splice each run's forecast onto the observed
    history before its origin, detect dimension peaks, and keep those
    dated inside that run's horizon.

    Peaks found by several runs are deduplicated by date (first
    occurrence wins). The returned set carries no percentile threshold:
    each run was thresholded within its own spliced series.
    """
    start = next(iter(actual.values())).start_date
    found: dict[dt.date, Peak] = {}
    for run in runs:
        origin_idx = (run.origin_date - start).days
        horizon = run.spec.horizon_days
        spliced = {}
        for marker, series in actual.items():
            history = series.values[:origin_idx]
            merged = np.concatenate([history, run.predictions[marker].values])
            spliced[marker] = DailySeries(start, merged, series.unit)
        ps = dimension_peaks(spliced, smoothing=smoothing, percentile=percentile)
        for peak in ps.peaks:
            if origin_idx <= peak.index < origin_idx + horizon:
                found.setdefault(peak.date, peak)
    kept = tuple(sorted(found.values(), key=lambda p: p.index))
    return PeakSet(series_id=series_id, peaks=kept, percentile_threshold=None)


def rolling_mape(
    actual: Mapping[str, DailySeries], runs: Iterable[ForecastRun]
) -> dict[str, MapeResult]:
    """Aggregate forecast error per marker across rolling runs.

    Each run contributes its window-mean APE; the result reports the mean
    and the across-window sample standard deviation of those window
    means. Windows whose actuals are all zero are skipped.
    """
    per_marker: dict[str, list[float]] = {}
    excluded: dict[str, int] = {}
    start = next(iter(actual.values())).start_date
    for run in runs:
        for marker, pred in run.predictions.items():
            series = actual[marker]
            i0 = (run.origin_date - start).days
            window = series.slice(i0, i0 + run.spec.horizon_days)
            try:
                result = mape(window, pred)
            except AllZeroActualsError:
                continue
            per_marker.setdefault(marker, []).append(result.mean)
            excluded[marker] = excluded.get(marker, 0) + result.n_excluded_zero
    out = {}
    for marker, means in per_marker.items():
        arr = np.asarray(means)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        out[marker] = MapeResult(
            mean=float(arr.mean()),
            std=std,
            n_points=arr.size,
            n_excluded_zero=excluded.get(marker, 0),
        )
    return out
