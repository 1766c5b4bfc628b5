"""Pipeline configuration: one TOML file, every CLI flag overrides its
config counterpart."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import InputError

__all__ = ["PipelineConfig", "load_config"]


@dataclass(frozen=True)
class PipelineConfig:
    docs: Path
    lexicon: Path
    dimensions: Path
    out_dir: Path
    date_from: dt.date
    date_to: dt.date
    smoothing_window: int = 7
    percentile: float = 80.0
    strategies: tuple[str, ...] = ("arima",)
    train_days: tuple[int, ...] = (7, 14, 21)
    horizon: int = 7
    stride: int = 1
    hit_n: tuple[int, ...] = (2, 3, 7)
    fill: str = "error"
    seed: int = 0
    jobs: int = 0  # 0 = available parallelism

    def __post_init__(self):
        if not self.strategies or not self.train_days or not self.hit_n:
            raise InputError("strategies, train_days and hit_n must be non-empty")
        if self.date_to < self.date_from:
            raise InputError("date range is empty")
        if self.fill not in ("error", "interpolate"):
            raise InputError(f"unknown fill policy {self.fill!r}")
        if self.jobs < 0:
            raise InputError("jobs must be >= 0")

    @property
    def effective_jobs(self) -> int:
        if self.jobs >= 1:
            return self.jobs
        import os

        return max(1, os.cpu_count() or 1)

    def override(self, **kwargs: Any) -> "PipelineConfig":
        """New config with the non-None entries of kwargs applied."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **updates) if updates else self


def _date(raw: Any, key: str) -> dt.date:
    if isinstance(raw, dt.date):
        return raw
    try:
        return dt.date.fromisoformat(str(raw))
    except ValueError as exc:
        raise InputError(f"config {key}: invalid date {raw!r}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a TOML pipeline config.

    Sections: [paths] docs/lexicon/dimensions/out, [range] from/to,
    [analysis] smoothing_window/percentile/fill, [forecast] strategies/
    train_days/horizon/stride/seed, [evaluate] hit_n, [run] jobs.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc

    def section(name: str) -> dict:
        value = raw.get(name, {})
        if not isinstance(value, dict):
            raise InputError(f"config section [{name}] must be a table")
        return value

    paths = section("paths")
    rng = section("range")
    analysis = section("analysis")
    forecast = section("forecast")
    evaluate = section("evaluate")
    run = section("run")
    missing = [k for k in ("docs", "lexicon", "dimensions", "out") if k not in paths]
    if missing:
        raise InputError(f"config [paths] missing keys: {missing}")
    if "from" not in rng or "to" not in rng:
        raise InputError("config [range] needs 'from' and 'to'")

    base = path.parent

    def respath(key: str) -> Path:
        p = Path(paths[key])
        return p if p.is_absolute() else base / p

    return PipelineConfig(
        docs=respath("docs"),
        lexicon=respath("lexicon"),
        dimensions=respath("dimensions"),
        out_dir=respath("out"),
        date_from=_date(rng["from"], "range.from"),
        date_to=_date(rng["to"], "range.to"),
        smoothing_window=int(analysis.get("smoothing_window", 7)),
        percentile=float(analysis.get("percentile", 80.0)),
        fill=str(analysis.get("fill", "error")),
        strategies=tuple(forecast.get("strategies", ["arima"])),
        train_days=tuple(int(x) for x in forecast.get("train_days", [7, 14, 21])),
        horizon=int(forecast.get("horizon", 7)),
        stride=int(forecast.get("stride", 1)),
        seed=int(forecast.get("seed", 0)),
        hit_n=tuple(int(x) for x in evaluate.get("hit_n", [2, 3, 7])),
        jobs=int(run.get("jobs", 0)),
    )
