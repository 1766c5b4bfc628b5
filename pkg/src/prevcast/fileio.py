"""Readers and writers for the documented file formats.

All writers emit deterministic bytes for identical inputs: fixed float
formatting, sorted JSON keys, trailing newline. Prevalence values carry
six decimal places; forecast values use the shortest exact float
representation so stage boundaries round-trip losslessly.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import InputError
from .forecast.base import ForecastRun, ForecastSpec
from .peaks import Peak, PeakSet
from .series import DailySeries

__all__ = [
    "write_prevalence_csv",
    "read_prevalence_csv",
    "write_peaks_csv",
    "write_peaks_json",
    "write_forecast_csv",
    "read_forecast_csv",
    "write_forecast_metadata",
    "write_json",
]


def _parse_date(raw: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(raw)
    except ValueError as exc:
        raise InputError(f"{where}: invalid date {raw!r}") from exc


def write_prevalence_csv(path: str | Path, ms: Mapping[str, DailySeries]) -> None:
    """`date,<marker1>,...,<markerK>` with values at 6 decimal places."""
    markers = list(ms)
    if not markers:
        raise InputError("no series to write")
    first = ms[markers[0]]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *markers])
        for i, date in enumerate(first.dates()):
            writer.writerow(
                [date.isoformat(), *(f"{ms[m].values[i]:.6f}" for m in markers)]
            )


def read_prevalence_csv(path: str | Path) -> dict[str, DailySeries]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if not header or header[0] != "date" or len(header) < 2:
            raise InputError(f"{path}: expected header 'date,<markers...>'")
        markers = header[1:]
        dates: list[dt.date] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields")
            dates.append(_parse_date(row[0], f"{path}:{lineno}"))
            try:
                rows.append([float(x) for x in row[1:]])
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    if not dates:
        raise InputError(f"{path}: no data rows")
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days != 1:
            raise InputError(f"{path}: dates must be consecutive, gap before {cur}")
    data = np.asarray(rows)
    return {
        m: DailySeries(dates[0], data[:, j], unit="percent")
        for j, m in enumerate(markers)
    }


def write_peaks_csv(path: str | Path, ps: PeakSet) -> None:
    """`series_id,date,index,height,prominence`, one row per retained peak."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series_id", "date", "index", "height", "prominence"])
        for p in ps.peaks:
            writer.writerow(
                [ps.series_id, p.date.isoformat(), p.index, repr(p.height), repr(p.prominence)]
            )


def write_peaks_json(path: str | Path, ps: PeakSet) -> None:
    write_json(
        path,
        {
            "series_id": ps.series_id,
            "percentile_threshold": ps.percentile_threshold,
            "n_peaks": len(ps.peaks),
            "peaks": [
                {
                    "index": p.index,
                    "date": p.date.isoformat(),
                    "height": p.height,
                    "prominence": p.prominence,
                }
                for p in ps.peaks
            ],
        },
    )


def write_forecast_csv(path: str | Path, runs: Sequence[ForecastRun]) -> None:
    """`origin,strategy,train_days,marker,h1..hH`, one row per run and marker."""
    if not runs:
        raise InputError("no forecast runs to write")
    horizon = runs[0].spec.horizon_days
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["origin", "strategy", "train_days", "marker"]
            + [f"h{i}" for i in range(1, horizon + 1)]
        )
        for run in runs:
            for marker, series in run.predictions.items():
                writer.writerow(
                    [
                        run.origin_date.isoformat(),
                        run.spec.strategy,
                        run.spec.train_days,
                        marker,
                        *(repr(v) for v in series.values.tolist()),
                    ]
                )


def read_forecast_csv(path: str | Path) -> list[ForecastRun]:
    """Rebuild runs from a forecast CSV (metadata is not round-tripped)."""
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if header[:4] != ["origin", "strategy", "train_days", "marker"]:
            raise InputError(f"{path}: unexpected forecast header")
        horizon = len(header) - 4
        grouped: dict[tuple[dt.date, str, int], dict[str, np.ndarray]] = {}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields")
            origin = _parse_date(row[0], f"{path}:{lineno}")
            strategy, train_days, marker = row[1], int(row[2]), row[3]
            values = np.array([float(x) for x in row[4:]])
            grouped.setdefault((origin, strategy, train_days), {})[marker] = values
    runs = []
    for (origin, strategy, train_days), preds in grouped.items():
        spec = ForecastSpec(strategy=strategy, train_days=train_days, horizon_days=horizon)
        runs.append(
            ForecastRun(
                origin_date=origin,
                spec=spec,
                predictions={
                    m: DailySeries(origin, v, unit="percent") for m, v in preds.items()
                },
            )
        )
    runs.sort(key=lambda r: r.origin_date)
    return runs


def _json_safe(obj: Any) -> Any:
    """Strip run metadata down to JSON-encodable values."""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if isinstance(obj, dt.date):
        return obj.isoformat()
    return repr(obj)


def write_forecast_metadata(path: str | Path, runs: Sequence[ForecastRun]) -> None:
    """Orders chosen, fallbacks triggered, loss curves; one entry per run."""
    entries = []
    for run in runs:
        meta = {k: v for k, v in run.metadata.items() if k != "model"}
        if "per_marker" in meta:
            meta["per_marker"] = {
                m: {k: v for k, v in info.items() if k != "model"}
                for m, info in meta["per_marker"].items()
            }
        entries.append(
            {
                "origin": run.origin_date.isoformat(),
                "strategy": run.spec.strategy,
                "train_days": run.spec.train_days,
                "metadata": _json_safe(meta),
            }
        )
    write_json(path, entries)


def write_json(path: str | Path, obj: Any) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_json_safe(obj), fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
