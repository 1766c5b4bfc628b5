"""Evaluation report and chart writers shared by the pipeline and the
standalone CLI stages.

Reports: per-marker MAPE summary and per-window detail, hit rates (the
spec-shaped table keeps each strategy's best train_days by dimension-mean
MAPE), pairwise strategy comparisons, and one SVG chart per dimension.
"""

from __future__ import annotations

import csv
import itertools
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .charts import render_dimension_chart
from .errors import AllZeroActualsError, NoActualPeaksError
from .evaluation import HitWindow, hit_rate, mape, paired_compare, rolling_mape, spliced_dimension_peaks
from .fileio import write_json
from .forecast.base import ForecastRun
from .lexicon import DimensionSpec
from .peaks import PeakSet
from .series import DailySeries, SmoothingSpec, rolling_mean

__all__ = [
    "window_mape_rows",
    "summary_mape_rows",
    "build_comparisons",
    "write_eval_reports",
    "write_charts",
]

WindowRow = tuple[str, str, str, int, str, float]  # dim, marker, strategy, train, origin, mape

RunsByCombo = Mapping[tuple[str, str, int], Sequence[ForecastRun]]


def _dimension_series(
    prevalence: Mapping[str, DailySeries], dim: DimensionSpec
) -> dict[str, DailySeries]:
    return {m: prevalence[m] for m in dim.markers}


def dimension_mean_series(
    ms: Mapping[str, DailySeries], smoothing: SmoothingSpec
) -> DailySeries:
    smoothed = [rolling_mean(s, smoothing).values for s in ms.values()]
    first = next(iter(ms.values()))
    return DailySeries(first.start_date, np.mean(smoothed, axis=0), unit=first.unit)


def window_mape_rows(
    dimensions: Mapping[str, DimensionSpec],
    prevalence: Mapping[str, DailySeries],
    runs_by_combo: RunsByCombo,
) -> list[WindowRow]:
    rows: list[WindowRow] = []
    for (dim_name, strategy, train), runs in sorted(runs_by_combo.items()):
        ms = _dimension_series(prevalence, dimensions[dim_name])
        for run in runs:
            for marker in dimensions[dim_name].markers:
                series = ms[marker]
                i0 = (run.origin_date - series.start_date).days
                window = series.slice(i0, i0 + run.spec.horizon_days)
                try:
                    m = mape(window, run.predictions[marker])
                except AllZeroActualsError:
                    continue
                rows.append(
                    (dim_name, marker, strategy, train, run.origin_date.isoformat(), m.mean)
                )
    return rows


def summary_mape_rows(
    dimensions: Mapping[str, DimensionSpec],
    prevalence: Mapping[str, DailySeries],
    runs_by_combo: RunsByCombo,
) -> tuple[list[tuple], dict[tuple[str, str, int], float]]:
    """Per-marker MAPE summaries plus the dimension-mean MAPE per combo."""
    rows = []
    combo_means: dict[tuple[str, str, int], float] = {}
    for (dim_name, strategy, train), runs in sorted(runs_by_combo.items()):
        ms = _dimension_series(prevalence, dimensions[dim_name])
        per_marker = rolling_mape(ms, runs)
        for marker in dimensions[dim_name].markers:
            result = per_marker.get(marker)
            if result is None:
                continue
            rows.append((dim_name, marker, strategy, train, result.mean, result.std))
        if per_marker:
            combo_means[(dim_name, strategy, train)] = float(
                np.mean([r.mean for r in per_marker.values()])
            )
    return rows, combo_means


def build_comparisons(window_rows: Sequence[WindowRow]) -> list[dict]:
    """Pairwise strategy comparisons on aligned per-window MAPE vectors."""
    by_key: dict[tuple[str, str, str, int], dict[str, float]] = {}
    dims: dict[str, set[str]] = {}
    strategies: list[str] = []
    trains: set[int] = set()
    for dim_name, marker, strategy, train, origin, value in window_rows:
        by_key.setdefault((dim_name, marker, strategy, train), {})[origin] = value
        dims.setdefault(dim_name, set()).add(marker)
        if strategy not in strategies:
            strategies.append(strategy)
        trains.add(train)
    comparisons = []
    for dim_name in sorted(dims):
        for marker in sorted(dims[dim_name]):
            for train in sorted(trains):
                for s_a, s_b in itertools.combinations(strategies, 2):
                    a = by_key.get((dim_name, marker, s_a, train))
                    b = by_key.get((dim_name, marker, s_b, train))
                    if not a or not b:
                        continue
                    shared = sorted(set(a) & set(b))
                    if len(shared) < 8:
                        continue
                    result = paired_compare([a[o] for o in shared], [b[o] for o in shared])
                    comparisons.append(
                        {
                            "dimension": dim_name,
                            "marker": marker,
                            "strategy_a": s_a,
                            "strategy_b": s_b,
                            "train_days": train,
                            "n_windows": len(shared),
                            "test_used": result.test_used,
                            "p_value": result.p_value,
                            "cohens_d": result.cohens_d,
                            "significant": result.significant,
                        }
                    )
    return comparisons


def write_eval_reports(
    out_dir: Path,
    dimensions: Mapping[str, DimensionSpec],
    prevalence: Mapping[str, DailySeries],
    actual_peaks: Mapping[str, PeakSet],
    runs_by_combo: RunsByCombo,
    hit_n: Sequence[int],
    percentile: float,
    smoothing: SmoothingSpec,
) -> tuple[list[Path], dict[tuple[str, str, int], float]]:
    """Write the four evaluation artifacts; returns (paths, combo means)."""
    out_dir = Path(out_dir)
    written: list[Path] = []

    def out(name: str) -> Path:
        path = out_dir / name
        written.append(path)
        return path

    summary_rows, combo_means = summary_mape_rows(dimensions, prevalence, runs_by_combo)
    window_rows = window_mape_rows(dimensions, prevalence, runs_by_combo)

    with open(out("mape_report.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dimension", "marker", "strategy", "train_days", "mape_mean", "mape_std"])
        for row in summary_rows:
            writer.writerow([*row[:4], repr(row[4]), repr(row[5])])

    with open(out("mape_windows.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dimension", "marker", "strategy", "train_days", "origin", "mape"])
        for row in window_rows:
            writer.writerow([*row[:5], repr(row[5])])

    combos = sorted(runs_by_combo)
    strategies = list(dict.fromkeys(c[1] for c in combos))
    train_values = sorted({c[2] for c in combos})
    best_rows = []
    detail_rows = []
    for dim_name in sorted(dimensions):
        ms = _dimension_series(prevalence, dimensions[dim_name])
        for strategy in strategies:
            candidates = [
                (combo_means.get((dim_name, strategy, t), np.inf), t) for t in train_values
            ]
            best_train = min(candidates)[1] if candidates else None
            for train in train_values:
                if (dim_name, strategy, train) not in runs_by_combo:
                    continue
                runs = runs_by_combo[(dim_name, strategy, train)]
                predicted = spliced_dimension_peaks(
                    ms, runs, smoothing=smoothing, percentile=percentile, series_id=dim_name
                )
                for n in hit_n:
                    try:
                        rate = hit_rate(actual_peaks[dim_name], predicted, HitWindow(n))
                    except NoActualPeaksError:
                        continue
                    # Precision is the reverse direction (every predicted
                    # peak near an actual one); secondary, details only.
                    if predicted.peaks:
                        prec = hit_rate(predicted, actual_peaks[dim_name], HitWindow(n))
                    else:
                        prec = None
                    detail_rows.append((dim_name, strategy, train, n, rate, prec))
                    if train == best_train:
                        best_rows.append((dim_name, strategy, n, rate))

    with open(out("hit_report.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dimension", "strategy", "n", "hit_rate"])
        for row in best_rows:
            writer.writerow([*row[:3], repr(row[3])])

    with open(out("hit_details.csv"), "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["dimension", "strategy", "train_days", "n", "hit_rate", "precision"])
        for row in detail_rows:
            writer.writerow(
                [*row[:4], repr(row[4]), "" if row[5] is None else repr(row[5])]
            )

    write_json(out("compare_report.json"), build_comparisons(window_rows))
    return written, combo_means


def write_charts(
    out_dir: Path,
    dimensions: Mapping[str, DimensionSpec],
    prevalence: Mapping[str, DailySeries],
    actual_peaks: Mapping[str, PeakSet],
    runs_by_combo: RunsByCombo,
    combo_means: Mapping[tuple[str, str, int], float],
    smoothing: SmoothingSpec,
) -> list[Path]:
    """One SVG per dimension using its best combo by dimension-mean MAPE."""
    out_dir = Path(out_dir)
    written = []
    combos = sorted(runs_by_combo)
    for dim_name in sorted(dimensions):
        dim_combos = [c for c in combos if c[0] == dim_name]
        if not dim_combos:
            continue
        best = min(dim_combos, key=lambda c: (combo_means.get(c, np.inf), c[1], c[2]))
        _, strategy, train = best
        ms = _dimension_series(prevalence, dimensions[dim_name])
        svg = render_dimension_chart(
            title=f"{dim_name}: real vs {strategy} forecasts (train={train}d)",
            real=dimension_mean_series(ms, smoothing),
            forecast_runs=runs_by_combo[best],
            actual_peaks=actual_peaks.get(dim_name),
            hit_window_days=3,
        )
        path = out_dir / f"chart_{dim_name}.svg"
        path.write_text(svg, encoding="utf-8")
        written.append(path)
    return written
