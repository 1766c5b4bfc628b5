"""End-to-end pipeline: ingest, prevalence, peaks, rolling forecasts,
evaluation reports, and charts.

Work parallelizes across ingestion chunks and (dimension, strategy,
train_days) combos; results are merged in deterministic order so a run
with N workers is byte-identical to a serial one. Partial outputs are
removed if any stage fails.
"""

from __future__ import annotations

import datetime as dt
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Mapping

from . import __version__
from .config import PipelineConfig
from .corpus import DocumentKind, RecordError, parse_documents, preprocess_text
from .errors import InputError, InsufficientDataError
from .fileio import (
    write_forecast_csv,
    write_forecast_metadata,
    write_json,
    write_peaks_csv,
    write_peaks_json,
    write_prevalence_csv,
)
from .forecast import ForecastSpec, rolling_forecast
from .lexicon import (
    DimensionSpec,
    Lexicon,
    count_documents,
    load_dimensions,
    load_lexicon,
    merge_counts,
    prevalence_from_counts,
)
from .peaks import PeakSet, dimension_peaks
from .reports import write_charts, write_eval_reports
from .series import DailySeries, SmoothingSpec

__all__ = ["run_pipeline", "ingest_prevalence"]

logger = logging.getLogger("prevcast.pipeline")


def _count_chunk(args: tuple[list[bytes], Lexicon]) -> tuple[dict, int, int]:
    """Worker: parse+normalize one chunk of NDJSON lines, return counts.

    Returns (day counts, parse errors seen, retweets dropped).
    """
    lines, lexicon = args
    n_errors = 0
    n_dropped = 0

    def kept_docs():
        nonlocal n_errors, n_dropped
        for item in parse_documents(lines):
            if isinstance(item, RecordError):
                n_errors += 1
                continue
            if item.kind is DocumentKind.RETWEET:
                n_dropped += 1
                continue
            yield item, preprocess_text(item.text)

    counts = count_documents(kept_docs(), lexicon)
    return counts, n_errors, n_dropped


def ingest_prevalence(
    docs_path: str | Path,
    lexicon: Lexicon,
    date_range: tuple[dt.date, dt.date],
    fill: str = "error",
    jobs: int = 1,
) -> tuple[dict[str, DailySeries], dict[str, int]]:
    """Parse documents and compute per-marker prevalence series.

    With ``jobs > 1`` the line stream is split into chunks counted in
    parallel and merged (counting is a commutative monoid, so the result
    is identical to a serial run). Returns (series per marker, ingestion
    stats).
    """
    docs_path = Path(docs_path)
    try:
        raw = docs_path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read documents file {docs_path}: {exc}") from exc
    lines = raw.splitlines()
    if jobs <= 1 or len(lines) < 2 * jobs:
        parts = [_count_chunk((lines, lexicon))]
    else:
        step = (len(lines) + jobs - 1) // jobs
        chunks = [(lines[i : i + step], lexicon) for i in range(0, len(lines), step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_count_chunk, chunks))
    counts = merge_counts(*(p[0] for p in parts))
    stats = {
        "documents_counted": sum(day.total for day in counts.values()),
        "record_errors": sum(p[1] for p in parts),
        "retweets_dropped": sum(p[2] for p in parts),
    }
    series = prevalence_from_counts(counts, lexicon, date_range, fill=fill)
    return series, stats


def _forecast_combo(
    args: tuple[str, str, int, dict[str, DailySeries], int, int, int]
) -> tuple[str, str, int, list | None, str | None]:
    """Worker: one (dimension, strategy, train_days) sweep cell.

    Infeasible cells (e.g. a strategy whose minimum training length
    exceeds train_days) are reported as skipped instead of failing the
    whole sweep.
    """
    dim_name, strategy, train_days, ms, horizon, stride, seed = args
    spec = ForecastSpec(strategy=strategy, train_days=train_days, horizon_days=horizon, seed=seed)
    try:
        runs = rolling_forecast(ms, spec, stride=stride)
    except InsufficientDataError as exc:
        return dim_name, strategy, train_days, None, str(exc)
    return dim_name, strategy, train_days, runs, None


def _dimension_series(
    prevalence: Mapping[str, DailySeries], dim: DimensionSpec
) -> dict[str, DailySeries]:
    return {m: prevalence[m] for m in dim.markers}


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute every stage and return the run manifest.

    Output files land in ``config.out_dir``; any failure removes files
    written so far and re-raises.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def track(name: str) -> Path:
        path = out_dir / name
        written.append(path)
        return path

    try:
        lexicon = load_lexicon(config.lexicon)
        dimensions = load_dimensions(config.dimensions, lexicon)
        smoothing = SmoothingSpec(window_days=config.smoothing_window)
        jobs = config.effective_jobs

        prevalence, stats = ingest_prevalence(
            config.docs,
            lexicon,
            (config.date_from, config.date_to),
            fill=config.fill,
            jobs=jobs,
        )
        logger.info("ingested %s documents (%s)", stats["documents_counted"], stats)
        write_prevalence_csv(track("prevalence.csv"), prevalence)

        actual_peaks: dict[str, PeakSet] = {}
        for name, dim in dimensions.items():
            ms = _dimension_series(prevalence, dim)
            ps = dimension_peaks(ms, smoothing=smoothing, percentile=config.percentile, series_id=name)
            actual_peaks[name] = ps
            write_peaks_csv(track(f"peaks_{name}.csv"), ps)
            write_peaks_json(track(f"peaks_{name}.json"), ps)

        tasks = [
            (
                name,
                strategy,
                train,
                _dimension_series(prevalence, dimensions[name]),
                config.horizon,
                config.stride,
                config.seed,
            )
            for name in dimensions
            for strategy in config.strategies
            for train in config.train_days
        ]
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_forecast_combo, tasks))
        else:
            results = [_forecast_combo(t) for t in tasks]

        runs_by_combo = {}
        skipped = {}
        for dim_name, strategy, train, runs, reason in results:
            if runs is None:
                skipped[f"{dim_name}/{strategy}/t{train}"] = reason
                logger.warning(
                    "skipping %s %s train=%s: %s", dim_name, strategy, train, reason
                )
                continue
            runs_by_combo[(dim_name, strategy, train)] = runs
            stem = f"forecasts_{dim_name}_{strategy}_t{train}"
            write_forecast_csv(track(f"{stem}.csv"), runs)
            write_forecast_metadata(track(f"{stem}.meta.json"), runs)
        if not runs_by_combo:
            raise InputError(
                "every (strategy, train_days) combination was infeasible: "
                + "; ".join(f"{k}: {v}" for k, v in skipped.items())
            )

        report_paths, combo_means = write_eval_reports(
            out_dir,
            dimensions,
            prevalence,
            actual_peaks,
            runs_by_combo,
            hit_n=config.hit_n,
            percentile=config.percentile,
            smoothing=smoothing,
        )
        written.extend(report_paths)
        written.extend(
            write_charts(
                out_dir, dimensions, prevalence, actual_peaks, runs_by_combo, combo_means, smoothing
            )
        )

        manifest = {
            "version": __version__,
            "stats": stats,
            "outputs": sorted(
                [str(p.relative_to(out_dir)) for p in written] + ["manifest.json"]
            ),
            "dimensions": sorted(dimensions),
            "strategies": list(config.strategies),
            "train_days": list(config.train_days),
            "skipped_combos": skipped,
            "seed": config.seed,
        }
        write_json(track("manifest.json"), manifest)
        for path in written:
            if not path.exists() or path.stat().st_size == 0:
                raise InputError(f"declared output {path} missing or empty")
        return manifest
    except BaseException:
        for path in written:
            try:
                path.unlink(missing_ok=True)
            except OSError:  # pragma: no cover - best-effort cleanup
                pass
        raise
