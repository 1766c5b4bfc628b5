"""Synthetic series generators used as test oracles and demo inputs.

Every generator is a pure function of its parameters and seed, so
regenerating with the same spec is bit-identical.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .series import DailySeries

__all__ = ["SynthSpec", "ar1", "var1", "seasonal", "bumps", "synth_generate"]

DEFAULT_START = dt.date(2020, 3, 1)


@dataclass(frozen=True)
class SynthSpec:
    """Declarative form of a generator call (used by the CLI).

    ``generator`` is one of "ar1", "var1", "seasonal", "peaks";
    ``params`` holds that generator's keyword arguments.
    """

    generator: str
    length: int
    seed: int
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in ("ar1", "var1", "seasonal", "peaks"):
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.length < 10:
            raise ValueError("length must be >= 10")


def ar1(
    phi: float,
    sigma: float,
    length: int,
    seed: int,
    x0: float = 0.0,
    start_date: dt.date = DEFAULT_START,
) -> DailySeries:
    """x[t] = phi * x[t-1] + N(0, sigma); x[0] = x0."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    shocks = rng.normal(0.0, sigma, size=length)
    v = np.empty(length)
    v[0] = x0
    for t in range(1, length):
        v[t] = phi * v[t - 1] + shocks[t]
    return DailySeries(start_date, v)


def var1(
    a_matrix: Sequence[Sequence[float]],
    sigma: float,
    length: int,
    seed: int,
    names: Sequence[str] | None = None,
    start_date: dt.date = DEFAULT_START,
) -> dict[str, DailySeries]:
    """x[t] = A x[t-1] + N(0, sigma I); x[0] = 0."""
    a = np.asarray(a_matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("a_matrix must be square")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    k = a.shape[0]
    names = list(names) if names is not None else [f"m{i + 1}" for i in range(k)]
    if len(names) != k:
        raise ValueError("need one name per series")
    rng = np.random.default_rng(seed)
    shocks = rng.normal(0.0, sigma, size=(length, k))
    v = np.zeros((length, k))
    for t in range(1, length):
        v[t] = a @ v[t - 1] + shocks[t]
    return {name: DailySeries(start_date, v[:, j]) for j, name in enumerate(names)}


def seasonal(
    period: float,
    amplitude: float,
    trend: float,
    length: int,
    seed: int,
    level: float = 0.0,
    noise_sigma: float = 0.0,
    start_date: dt.date = DEFAULT_START,
) -> DailySeries:
    """level + amplitude*sin(2*pi*t/period) + trend*t + optional noise."""
    rng = np.random.default_rng(seed)
    t = np.arange(length, dtype=np.float64)
    v = level + amplitude * np.sin(2.0 * np.pi * t / period) + trend * t
    if noise_sigma > 0:
        v = v + rng.normal(0.0, noise_sigma, size=length)
    return DailySeries(start_date, v)


def bumps(
    background: float,
    bump_days: Sequence[int],
    bump_width: float,
    bump_height: float | Sequence[float],
    length: int,
    seed: int,
    noise_sigma: float = 0.0,
    start_date: dt.date = DEFAULT_START,
) -> DailySeries:
    """Flat background plus Gaussian bumps centered on ``bump_days``.

    ``bump_height`` may be a scalar (all bumps equal) or one value per
    bump.
    """
    if bump_width <= 0:
        raise ValueError("bump_width must be positive")
    if np.isscalar(bump_height):
        heights = [float(bump_height)] * len(bump_days)
    else:
        heights = [float(h) for h in bump_height]
        if len(heights) != len(bump_days):
            raise ValueError("need one height per bump")
    rng = np.random.default_rng(seed)
    t = np.arange(length, dtype=np.float64)
    v = np.full(length, float(background))
    for center, height in zip(bump_days, heights):
        v += height * np.exp(-0.5 * ((t - center) / bump_width) ** 2)
    if noise_sigma > 0:
        v = v + rng.normal(0.0, noise_sigma, size=length)
    return DailySeries(start_date, v)


def synth_generate(spec: SynthSpec, start_date: dt.date = DEFAULT_START):
    """Run the generator described by ``spec``.

    Returns a DailySeries, or a dict of them for "var1".
    """
    common = {"length": spec.length, "seed": spec.seed, "start_date": start_date}
    if spec.generator == "ar1":
        return ar1(**{**spec.params, **common})
    if spec.generator == "var1":
        return var1(**{**spec.params, **common})
    if spec.generator == "seasonal":
        return seasonal(**{**spec.params, **common})
    return bumps(**{**spec.params, **common})
