"""GRU forecasting: a single-layer gated recurrent network trained from
scratch per forecasting origin.

Inputs are quartile-normalized per series. Training pairs every length-
``train_days`` subsequence of the available history with its one-step-
ahead targets and minimizes mean squared error with RMSProp, gradients
by full backpropagation through time (the recurrent kernels live in
``prevcast._kernels``). Multi-step forecasts feed predictions back in
recursively and are denormalized at the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .. import _kernels as kernels
from ..errors import InsufficientDataError, NonFiniteError
from ..series import DailySeries, RobustScaleParams, robust_normalize
from .base import (
    ForecastRun,
    ForecastSpec,
    check_aligned,
    derive_seed,
    forecast_series,
    origin_after,
)

__all__ = ["GruParams", "GruConfig", "fit_gru_forecast"]

_WEIGHT_NAMES = ("Wz", "Wr", "Wh", "Uz", "Ur", "Uh", "bz", "br", "bh", "V", "b_o")


@dataclass(frozen=True)
class GruConfig:
    """Training hyperparameters (the learning schedule is fixed).

    ``batch_size=None`` runs full-batch epochs; the default of 8 shuffles
    windows each epoch (seeded) for more updates on short histories.
    """

    hidden_dim: int = 32
    learning_rate: float = 1e-3
    decay: float = 0.9
    epsilon: float = 1e-8
    max_epochs: int = 200
    stall_tolerance: float = 1e-6
    stall_patience: int = 10
    batch_size: int | None = 8


@dataclass
class GruParams:
    """All network weights plus the per-series normalization used at fit time."""

    Wz: np.ndarray
    Wr: np.ndarray
    Wh: np.ndarray
    Uz: np.ndarray
    Ur: np.ndarray
    Uh: np.ndarray
    bz: np.ndarray
    br: np.ndarray
    bh: np.ndarray
    V: np.ndarray
    b_o: np.ndarray
    normalization: dict[str, RobustScaleParams]

    def as_dict(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in _WEIGHT_NAMES}

    def check_finite(self) -> None:
        for name in _WEIGHT_NAMES:
            if not np.all(np.isfinite(getattr(self, name))):
                raise NonFiniteError(f"GRU weight {name} became non-finite")


def init_params(
    input_dim: int,
    hidden_dim: int,
    rng: np.random.Generator,
    normalization: dict[str, RobustScaleParams] | None = None,
) -> GruParams:
    """Small random gate weights, zero biases."""
    k, h = input_dim, hidden_dim
    def w(rows, cols, scale):
        return rng.normal(0.0, scale, size=(rows, cols))

    return GruParams(
        Wz=w(h, k, 1.0 / np.sqrt(k)),
        Wr=w(h, k, 1.0 / np.sqrt(k)),
        Wh=w(h, k, 1.0 / np.sqrt(k)),
        Uz=w(h, h, 1.0 / np.sqrt(h)),
        Ur=w(h, h, 1.0 / np.sqrt(h)),
        Uh=w(h, h, 1.0 / np.sqrt(h)),
        bz=np.zeros(h),
        br=np.zeros(h),
        bh=np.zeros(h),
        V=w(k, h, 1.0 / np.sqrt(h)),
        b_o=np.zeros(k),
        normalization=normalization or {},
    )


def gru_predict_sequence(params: GruParams, x_seq: np.ndarray) -> np.ndarray:
    """Per-step next-value predictions for one normalized sequence (T, k)."""
    H, _, _, _ = kernels.gru_forward(
        x_seq[None, :, :],
        params.Wz, params.Wr, params.Wh,
        params.Uz, params.Ur, params.Uh,
        params.bz, params.br, params.bh,
    )
    return H[0, 1:] @ params.V.T + params.b_o


def loss_and_grads(
    params: GruParams, x: np.ndarray, y: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """MSE loss over (B, T, k) targets and gradients for every weight."""
    h_all, z, r, hb = kernels.gru_forward(
        x,
        params.Wz, params.Wr, params.Wh,
        params.Uz, params.Ur, params.Uh,
        params.bz, params.br, params.bh,
    )
    h_out = h_all[:, 1:]  # (B, T, h)
    y_hat = h_out @ params.V.T + params.b_o
    err = y_hat - y
    loss = float(np.mean(err**2))
    d_yhat = (2.0 / err.size) * err
    d_v = np.einsum("bti,btj->ij", d_yhat, h_out)
    d_bo = d_yhat.sum(axis=(0, 1))
    d_h = d_yhat @ params.V
    rec = kernels.gru_backward(
        x, h_all, z, r, hb, d_h,
        params.Wz, params.Wr, params.Wh,
        params.Uz, params.Ur, params.Uh,
    )
    grads = dict(zip(("Wz", "Wr", "Wh", "Uz", "Ur", "Uh", "bz", "br", "bh"), rec))
    grads["V"] = d_v
    grads["b_o"] = d_bo
    return loss, grads


def _train(
    params: GruParams,
    x: np.ndarray,
    y: np.ndarray,
    config: GruConfig,
    rng: np.random.Generator,
) -> list[float]:
    """RMSProp until max_epochs or the loss stalls; returns the loss curve."""
    cache = {name: np.zeros_like(getattr(params, name)) for name in _WEIGHT_NAMES}
    curve: list[float] = []
    n_windows = x.shape[0]
    best = np.inf
    stall = 0
    for _ in range(config.max_epochs):
        if config.batch_size is None or config.batch_size >= n_windows:
            batches = [np.arange(n_windows)]
        else:
            order = rng.permutation(n_windows)
            batches = [
                order[i : i + config.batch_size]
                for i in range(0, n_windows, config.batch_size)
            ]
        epoch_loss = 0.0
        for idx in batches:
            loss, grads = loss_and_grads(params, x[idx], y[idx])
            if not np.isfinite(loss):
                raise NonFiniteError("GRU training loss became non-finite")
            epoch_loss += loss * idx.size
            for name in _WEIGHT_NAMES:
                g = grads[name]
                c = cache[name]
                c *= config.decay
                c += (1.0 - config.decay) * g * g
                getattr(params, name)[...] -= (
                    config.learning_rate * g / (np.sqrt(c) + config.epsilon)
                )
            params.check_finite()
        epoch_loss /= n_windows
        curve.append(epoch_loss)
        if best - epoch_loss < config.stall_tolerance:
            stall += 1
            if stall >= config.stall_patience:
                break
        else:
            stall = 0
        best = min(best, epoch_loss)
    return curve


def fit_gru_forecast(
    ms: Mapping[str, DailySeries],
    spec: ForecastSpec,
    config: GruConfig = GruConfig(),
) -> ForecastRun:
    """Train on all of ``ms`` (history up to the origin) and predict.

    Subsequence length equals ``spec.train_days``; every window of that
    length drawn from the history contributes one training sequence. All
    randomness (weight init) derives from ``spec.seed``, the origin date,
    and the marker names, so rolling runs are reproducible regardless of
    execution order.
    """
    markers = list(ms)
    check_aligned(ms)
    length = len(next(iter(ms.values())))
    seq_len = spec.train_days
    if length < seq_len + 1:
        raise InsufficientDataError(
            f"GRU needs at least train_days+1={seq_len + 1} observations, have {length}"
        )

    normalization: dict[str, RobustScaleParams] = {}
    cols = []
    for m in markers:
        normalized, params_m = robust_normalize(ms[m])
        normalization[m] = params_m
        cols.append(normalized.values)
    data = np.column_stack(cols)  # (T, k)
    k = len(markers)

    n_windows = length - seq_len
    x = np.stack([data[t : t + seq_len] for t in range(n_windows)])
    y = np.stack([data[t + 1 : t + seq_len + 1] for t in range(n_windows)])

    origin = origin_after(next(iter(ms.values())))
    seed = derive_seed(spec.seed, origin.isoformat(), *markers)
    rng = np.random.default_rng(seed)
    params = init_params(k, config.hidden_dim, rng, normalization)
    curve = _train(params, x, y, config, rng)

    # Recursive multi-step forecast: replay the last window, then feed
    # each prediction back in as the next input.
    preds_norm = np.empty((spec.horizon_days, k))
    h_state = np.zeros(config.hidden_dim)
    window = data[-seq_len:]
    for x_t in window:
        h_state = _cell_step(params, x_t, h_state)
    current = params.V @ h_state + params.b_o
    preds_norm[0] = current
    for step in range(1, spec.horizon_days):
        h_state = _cell_step(params, current, h_state)
        current = params.V @ h_state + params.b_o
        preds_norm[step] = current
    if not np.all(np.isfinite(preds_norm)):
        raise NonFiniteError("GRU forecast produced non-finite values")

    out: dict[str, DailySeries] = {}
    for j, m in enumerate(markers):
        out[m] = forecast_series(origin, normalization[m].invert(preds_norm[:, j]), ms[m].unit)
    meta: dict[str, Any] = {
        "strategy": "gru",
        "markers": markers,
        "seed": seed,
        "epochs": len(curve),
        "loss_curve": curve,
        "model": params,
    }
    return ForecastRun(origin_date=origin, spec=spec, predictions=out, metadata=meta)


def _sigmoid(v: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-v))


def _cell_step(params: GruParams, x_t: np.ndarray, h_prev: np.ndarray) -> np.ndarray:
    """Single GRU cell update for one unbatched timestep."""
    z = _sigmoid(params.Wz @ x_t + params.Uz @ h_prev + params.bz)
    r = _sigmoid(params.Wr @ x_t + params.Ur @ h_prev + params.br)
    hb = np.tanh(params.Wh @ x_t + params.Uh @ (r * h_prev) + params.bh)
    return (1.0 - z) * h_prev + z * hb
