"""Command-line interface.

Subcommands mirror the pipeline stages (prevalence, peaks, forecast,
evaluate, compare, plot, synth) plus an all-in-one ``pipeline``; each
stage reads and writes the documented file formats so they can be
scripted independently. ``PREVCAST_LOG`` sets the log level. Exit codes:
0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import PipelineConfig, load_config
from .errors import InputError, NumericalError, PrevcastError
from .evaluation import HitWindow
from .fileio import (
    read_forecast_csv,
    read_prevalence_csv,
    write_forecast_csv,
    write_forecast_metadata,
    write_json,
    write_peaks_csv,
    write_peaks_json,
    write_prevalence_csv,
)
from .forecast import ForecastSpec, rolling_forecast
from .lexicon import load_dimensions, load_lexicon
from .peaks import dimension_peaks, select_peaks
from .pipeline import ingest_prevalence, run_pipeline
from .reports import (
    build_comparisons,
    dimension_mean_series,
    summary_mape_rows,
    write_charts,
    write_eval_reports,
)
from .series import SmoothingSpec
from .synth import SynthSpec, synth_generate

logger = logging.getLogger("prevcast.cli")


def _date_arg(raw: str) -> dt.date:
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid date {raw!r} (expected YYYY-MM-DD)")


def _int_list(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in raw.split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {raw!r}")


def _str_list(raw: str) -> tuple[str, ...]:
    return tuple(x for x in raw.split(",") if x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prevcast",
        description="Lexicon-marker prevalence series, peak detection, and forecasting.",
    )
    parser.add_argument("--version", action="version", version=f"prevcast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prevalence", help="ingest NDJSON documents into daily prevalence CSV")
    p.add_argument("--docs", required=True, type=Path)
    p.add_argument("--lexicon", required=True, type=Path)
    p.add_argument("--from", dest="date_from", required=True, type=_date_arg)
    p.add_argument("--to", dest="date_to", required=True, type=_date_arg)
    p.add_argument("--fill", choices=("error", "interpolate"), default="error")
    p.add_argument("--jobs", type=int, default=0, help="0 = available parallelism")
    p.add_argument("--out", required=True, type=Path, help="output directory")

    p = sub.add_parser("peaks", help="detect high-prevalence peaks per dimension")
    p.add_argument("--prevalence", required=True, type=Path, help="prevalence CSV")
    p.add_argument("--dimensions", required=True, type=Path)
    p.add_argument("--percentile", type=float, default=80.0)
    p.add_argument("--smooth-window", type=int, default=7)
    p.add_argument(
        "--on",
        choices=("gradient", "smoothed"),
        default="gradient",
        help="detect on the dimension gradient (default) or directly on smoothed prevalence",
    )
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("forecast", help="rolling forecasts per dimension")
    p.add_argument("--prevalence", required=True, type=Path)
    p.add_argument("--dimensions", required=True, type=Path)
    p.add_argument("--strategy", type=_str_list, default=("arima",), help="comma-separated")
    p.add_argument("--train-days", type=_int_list, default=(7, 14, 21), help="comma-separated")
    p.add_argument("--horizon", type=int, default=7)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("evaluate", help="MAPE and hit-rate reports from forecast CSVs")
    p.add_argument("--prevalence", required=True, type=Path)
    p.add_argument("--dimensions", required=True, type=Path)
    p.add_argument("--forecasts", required=True, type=Path, nargs="+",
                   help="forecast CSV files or directories containing them")
    p.add_argument("--percentile", type=float, default=80.0)
    p.add_argument("--smooth-window", type=int, default=7)
    p.add_argument("--hit-n", type=_int_list, default=(2, 3, 7))
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("compare", help="pairwise strategy comparisons from per-window MAPEs")
    p.add_argument("--windows", required=True, type=Path, help="mape_windows.csv")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("plot", help="SVG chart per dimension")
    p.add_argument("--prevalence", required=True, type=Path)
    p.add_argument("--dimensions", required=True, type=Path)
    p.add_argument("--forecasts", type=Path, nargs="*", default=[])
    p.add_argument("--percentile", type=float, default=80.0)
    p.add_argument("--smooth-window", type=int, default=7)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("synth", help="generate synthetic series")
    p.add_argument("--generator", required=True, choices=("ar1", "var1", "seasonal", "peaks"))
    p.add_argument("--length", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", default="{}", help="generator parameters as a JSON object")
    p.add_argument("--start", type=_date_arg, default=dt.date(2020, 3, 1))
    p.add_argument("--out", required=True, type=Path, help="output CSV file")

    p = sub.add_parser("pipeline", help="run every stage end to end")
    p.add_argument("--config", type=Path, help="TOML config; flags override its values")
    p.add_argument("--docs", type=Path)
    p.add_argument("--lexicon", type=Path)
    p.add_argument("--dimensions", type=Path)
    p.add_argument("--from", dest="date_from", type=_date_arg)
    p.add_argument("--to", dest="date_to", type=_date_arg)
    p.add_argument("--strategy", type=_str_list)
    p.add_argument("--train-days", type=_int_list)
    p.add_argument("--horizon", type=int)
    p.add_argument("--stride", type=int)
    p.add_argument("--percentile", type=float)
    p.add_argument("--smooth-window", type=int)
    p.add_argument("--hit-n", type=_int_list)
    p.add_argument("--fill", choices=("error", "interpolate"))
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", type=Path)
    return parser


def _cmd_prevalence(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    jobs = args.jobs if args.jobs >= 1 else max(1, os.cpu_count() or 1)
    series, stats = ingest_prevalence(
        args.docs, lexicon, (args.date_from, args.date_to), fill=args.fill, jobs=jobs
    )
    args.out.mkdir(parents=True, exist_ok=True)
    write_prevalence_csv(args.out / "prevalence.csv", series)
    logger.info("prevalence written (%s)", stats)
    print(f"wrote {args.out / 'prevalence.csv'} ({stats['documents_counted']} documents)")
    return 0


def _cmd_peaks(args) -> int:
    prevalence = read_prevalence_csv(args.prevalence)
    dimensions = load_dimensions(args.dimensions)
    smoothing = SmoothingSpec(window_days=args.smooth_window)
    args.out.mkdir(parents=True, exist_ok=True)
    for name, dim in dimensions.items():
        missing = [m for m in dim.markers if m not in prevalence]
        if missing:
            raise InputError(f"dimension {name!r}: markers missing from prevalence CSV: {missing}")
        ms = {m: prevalence[m] for m in dim.markers}
        if args.on == "gradient":
            ps = dimension_peaks(ms, smoothing=smoothing, percentile=args.percentile, series_id=name)
            suffix = ""
        else:
            ps = select_peaks(
                dimension_mean_series(ms, smoothing),
                percentile=args.percentile,
                series_id=f"{name}:smoothed",
            )
            suffix = "_smoothed"
        write_peaks_csv(args.out / f"peaks_{name}{suffix}.csv", ps)
        write_peaks_json(args.out / f"peaks_{name}{suffix}.json", ps)
        print(f"{name}: {len(ps.peaks)} peaks (threshold {ps.percentile_threshold})")
    return 0


def _cmd_forecast(args) -> int:
    prevalence = read_prevalence_csv(args.prevalence)
    dimensions = load_dimensions(args.dimensions)
    args.out.mkdir(parents=True, exist_ok=True)
    for name, dim in dimensions.items():
        ms = {m: prevalence[m] for m in dim.markers}
        for strategy in args.strategy:
            for train in args.train_days:
                spec = ForecastSpec(
                    strategy=strategy, train_days=train, horizon_days=args.horizon, seed=args.seed
                )
                runs = rolling_forecast(ms, spec, stride=args.stride)
                stem = f"forecasts_{name}_{strategy}_t{train}"
                write_forecast_csv(args.out / f"{stem}.csv", runs)
                write_forecast_metadata(args.out / f"{stem}.meta.json", runs)
                print(f"{stem}: {len(runs)} runs")
    return 0


def _collect_forecast_files(paths) -> list[Path]:
    files: list[Path] = []
    for p in paths:
        if p.is_dir():
            files.extend(sorted(p.glob("forecasts_*.csv")))
        else:
            files.append(p)
    if not files:
        raise InputError("no forecast CSVs found")
    return files


def _runs_by_combo_from_files(files, dimensions):
    marker_sets = {name: frozenset(d.markers) for name, d in dimensions.items()}
    runs_by_combo: dict[tuple[str, str, int], list] = {}
    for path in files:
        runs = read_forecast_csv(path)
        if not runs:
            continue
        markers = frozenset(runs[0].predictions)
        dim_name = next((n for n, s in marker_sets.items() if s == markers), None)
        if dim_name is None:
            raise InputError(
                f"{path}: marker set does not match any configured dimension"
            )
        spec = runs[0].spec
        runs_by_combo.setdefault((dim_name, spec.strategy, spec.train_days), []).extend(runs)
    for combo in runs_by_combo:
        runs_by_combo[combo].sort(key=lambda r: r.origin_date)
    return runs_by_combo


def _cmd_evaluate(args) -> int:
    prevalence = read_prevalence_csv(args.prevalence)
    dimensions = load_dimensions(args.dimensions)
    smoothing = SmoothingSpec(window_days=args.smooth_window)
    runs_by_combo = _runs_by_combo_from_files(_collect_forecast_files(args.forecasts), dimensions)
    actual = {
        name: dimension_peaks(
            {m: prevalence[m] for m in dim.markers},
            smoothing=smoothing,
            percentile=args.percentile,
            series_id=name,
        )
        for name, dim in dimensions.items()
    }
    args.out.mkdir(parents=True, exist_ok=True)
    for n in args.hit_n:
        HitWindow(n)  # validate early
    written, _ = write_eval_reports(
        args.out,
        dimensions,
        prevalence,
        actual,
        runs_by_combo,
        hit_n=args.hit_n,
        percentile=args.percentile,
        smoothing=smoothing,
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_compare(args) -> int:
    rows = []
    with open(args.windows, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["dimension", "marker", "strategy", "train_days", "origin", "mape"]
        if header != expected:
            raise InputError(f"{args.windows}: expected header {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 6:
                raise InputError(f"{args.windows}:{lineno}: expected 6 fields")
            rows.append((row[0], row[1], row[2], int(row[3]), row[4], float(row[5])))
    args.out.mkdir(parents=True, exist_ok=True)
    out_path = args.out / "compare_report.json"
    write_json(out_path, build_comparisons(rows))
    print(f"wrote {out_path}")
    return 0


def _cmd_plot(args) -> int:
    prevalence = read_prevalence_csv(args.prevalence)
    dimensions = load_dimensions(args.dimensions)
    smoothing = SmoothingSpec(window_days=args.smooth_window)
    runs_by_combo = {}
    if args.forecasts:
        runs_by_combo = _runs_by_combo_from_files(
            _collect_forecast_files(args.forecasts), dimensions
        )
    actual = {
        name: dimension_peaks(
            {m: prevalence[m] for m in dim.markers},
            smoothing=smoothing,
            percentile=args.percentile,
            series_id=name,
        )
        for name, dim in dimensions.items()
    }
    args.out.mkdir(parents=True, exist_ok=True)
    if runs_by_combo:
        _, combo_means = summary_mape_rows(dimensions, prevalence, runs_by_combo)
    else:
        combo_means = {}
        # Chart with no overlays: synthesize one empty combo per dimension.
        runs_by_combo = {(name, "none", 0): [] for name in dimensions}
    for path in write_charts(
        args.out, dimensions, prevalence, actual, runs_by_combo, combo_means, smoothing
    ):
        print(f"wrote {path}")
    return 0


def _cmd_synth(args) -> int:
    try:
        params = json.loads(args.params)
    except json.JSONDecodeError as exc:
        raise InputError(f"--params: invalid JSON ({exc.msg})")
    if not isinstance(params, dict):
        raise InputError("--params must be a JSON object")
    spec = SynthSpec(generator=args.generator, length=args.length, seed=args.seed, params=params)
    result = synth_generate(spec, start_date=args.start)
    if not isinstance(result, dict):
        result = {"value": result}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_prevalence_csv(args.out, result)
    print(f"wrote {args.out}")
    return 0


def _cmd_pipeline(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        required = ("docs", "lexicon", "dimensions", "date_from", "date_to", "out")
        missing = [name for name in required if getattr(args, name) is None]
        if missing:
            raise InputError(
                "without --config, these flags are required: "
                + ", ".join(f"--{n.replace('date_from', 'from').replace('date_to', 'to')}" for n in missing)
            )
        config = PipelineConfig(
            docs=args.docs,
            lexicon=args.lexicon,
            dimensions=args.dimensions,
            out_dir=args.out,
            date_from=args.date_from,
            date_to=args.date_to,
        )
    config = config.override(
        docs=args.docs,
        lexicon=args.lexicon,
        dimensions=args.dimensions,
        out_dir=args.out,
        date_from=args.date_from,
        date_to=args.date_to,
        strategies=args.strategy,
        train_days=args.train_days,
        horizon=args.horizon,
        stride=args.stride,
        percentile=args.percentile,
        smoothing_window=args.smooth_window,
        hit_n=args.hit_n,
        fill=args.fill,
        seed=args.seed,
        jobs=args.jobs,
    )
    manifest = run_pipeline(config)
    print(f"pipeline complete: {len(manifest['outputs'])} files in {config.out_dir}")
    return 0


_COMMANDS = {
    "prevalence": _cmd_prevalence,
    "peaks": _cmd_peaks,
    "forecast": _cmd_forecast,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "plot": _cmd_plot,
    "synth": _cmd_synth,
    "pipeline": _cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("PREVCAST_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return 2
    except (PrevcastError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
