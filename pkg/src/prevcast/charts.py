"""Self-contained SVG line charts: real vs forecast series with peak
markers and shaded hit windows.

Hand-rolled SVG keeps the output deterministic byte-for-byte (no
renderer state, no random ids); only the leading generator comment is
allowed to vary between builds.
"""

from __future__ import annotations

import datetime as dt
from typing import Sequence

import numpy as np

from . import __version__
from .forecast.base import ForecastRun
from .peaks import PeakSet
from .series import DailySeries

__all__ = ["render_dimension_chart"]

_WIDTH, _HEIGHT = 960, 320
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 56, 16, 28, 40

_STYLE = """\
    .axis { stroke: #333333; stroke-width: 1; }
    .grid { stroke: #dddddd; stroke-width: 0.5; }
    .real { stroke: #1f6fb2; stroke-width: 1.6; fill: none; }
    .forecast { stroke: #d95f02; stroke-width: 1.1; fill: none; opacity: 0.75; }
    .peakline { stroke: #444444; stroke-width: 1; stroke-dasharray: 4 3; }
    .hitwindow { fill: #9ecae1; opacity: 0.35; }
    .label { font: 11px sans-serif; fill: #333333; }
    .title { font: bold 13px sans-serif; fill: #111111; }
"""


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    step = (hi - lo) / count
    return [lo + i * step for i in range(count + 1)]


def render_dimension_chart(
    title: str,
    real: DailySeries,
    forecast_runs: Sequence[ForecastRun] = (),
    actual_peaks: PeakSet | None = None,
    hit_window_days: int = 3,
) -> str:
    """One dimension's chart as an SVG string.

    ``real`` is the dimension-level series; each forecast run contributes
    one overlay segment (the mean of its marker predictions). Actual
    peaks are dashed vertical lines with shaded ±hit_window_days bands.
    """
    x0 = _MARGIN_L
    x1 = _WIDTH - _MARGIN_R
    y0 = _HEIGHT - _MARGIN_B
    y1 = _MARGIN_T
    n = len(real)
    start = real.start_date

    all_vals = [real.values]
    for run in forecast_runs:
        all_vals.append(np.mean([s.values for s in run.predictions.values()], axis=0))
    lo = min(float(v.min()) for v in all_vals)
    hi = max(float(v.max()) for v in all_vals)
    if hi == lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    total_days = max(n - 1, 1)

    def sx(day_index: float) -> float:
        return x0 + (x1 - x0) * day_index / total_days

    def sy(value: float) -> float:
        return y0 - (y0 - y1) * (value - lo) / (hi - lo)

    parts: list[str] = []
    parts.append('<?xml version="1.0" encoding="UTF-8"?>')
    parts.append(f"<!-- generated by prevcast {__version__} -->")
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    parts.append(f"<style>\n{_STYLE}</style>")
    parts.append(f'<text class="title" x="{x0}" y="{y1 - 10}">{title}</text>')

    # Shaded hit windows and peak lines first so series draw on top.
    if actual_peaks is not None:
        for p in actual_peaks.peaks:
            left = sx(max(p.index - hit_window_days, 0))
            right = sx(min(p.index + hit_window_days, n - 1))
            parts.append(
                f'<rect class="hitwindow" x="{_fmt(left)}" y="{y1}" '
                f'width="{_fmt(right - left)}" height="{_fmt(y0 - y1)}"/>'
            )
        for p in actual_peaks.peaks:
            xp = sx(p.index)
            parts.append(
                f'<line class="peakline" x1="{_fmt(xp)}" y1="{y1}" x2="{_fmt(xp)}" y2="{y0}"/>'
            )

    # Axes, grid, labels.
    parts.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>')
    parts.append(f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>')
    for tick in _ticks(lo, hi):
        y = sy(tick)
        parts.append(f'<line class="grid" x1="{x0}" y1="{_fmt(y)}" x2="{x1}" y2="{_fmt(y)}"/>')
        parts.append(
            f'<text class="label" x="{x0 - 6}" y="{_fmt(y + 3)}" text-anchor="end">{tick:.3g}</text>'
        )
    n_xticks = min(8, total_days)
    for i in range(n_xticks + 1):
        day = round(i * total_days / n_xticks)
        x = sx(day)
        label = (start + dt.timedelta(days=day)).isoformat()
        parts.append(f'<line class="axis" x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 4}"/>')
        parts.append(
            f'<text class="label" x="{_fmt(x)}" y="{y0 + 16}" text-anchor="middle">{label}</text>'
        )

    def polyline(day_indices, values, cls: str) -> str:
        pts = " ".join(f"{_fmt(sx(d))},{_fmt(sy(v))}" for d, v in zip(day_indices, values))
        return f'<polyline class="{cls}" points="{pts}"/>'

    parts.append(polyline(range(n), real.values, "real"))
    for run in forecast_runs:
        vals = np.mean([s.values for s in run.predictions.values()], axis=0)
        offset = (run.origin_date - start).days
        days = [offset + i for i in range(len(vals))]
        days = [d for d in days if 0 <= d <= total_days]
        if days:
            parts.append(polyline(days, vals[: len(days)], "forecast"))

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
