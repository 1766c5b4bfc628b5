import numpy as np
import pytest

from prevcast.errors import InsufficientDataError
from prevcast.forecast import ForecastSpec, GruConfig, fit_gru_forecast
from prevcast.forecast.gru import (
    GruParams,
    _WEIGHT_NAMES,
    _cell_step,
    init_params,
    loss_and_grads,
)

from conftest import make_series


def spec(train=7, horizon=7, seed=0):
    return ForecastSpec(strategy="gru", train_days=train, horizon_days=horizon, seed=seed)


def zero_params(k, h):
    shapes = {
        "Wz": (h, k), "Wr": (h, k), "Wh": (h, k),
        "Uz": (h, h), "Ur": (h, h), "Uh": (h, h),
        "bz": (h,), "br": (h,), "bh": (h,),
        "V": (k, h), "b_o": (k,),
    }
    return GruParams(**{n: np.zeros(s) for n, s in shapes.items()}, normalization={})


class TestCellAlgebra:
    def test_zero_parameters_hidden_stays_zero(self):
        # z = sigmoid(0) = 0.5 and the candidate state is tanh(0) = 0, so
        # the hidden state never leaves zero and the output is the bias.
        params = zero_params(k=2, h=4)
        h_state = np.zeros(4)
        for x in (np.array([1.0, -2.0]), np.array([3.0, 0.5])):
            h_state = _cell_step(params, x, h_state)
            np.testing.assert_array_equal(h_state, 0.0)

    def test_zero_parameters_forecast_is_output_bias(self):
        params = zero_params(k=1, h=4)
        params.b_o[:] = 0.37
        h_state = np.zeros(4)
        outs = []
        cur = None
        for x in np.linspace(-1, 1, 7):
            h_state = _cell_step(params, np.array([x]), h_state)
            cur = params.V @ h_state + params.b_o
            outs.append(cur[0])
        np.testing.assert_allclose(outs, 0.37)


class TestGradientCheck:
    @pytest.mark.parametrize("seed", range(10))
    def test_analytic_matches_central_differences(self, seed):
        """3 markers x 10 steps, step 1e-5, max relative error < 1e-4."""
        rng = np.random.default_rng(seed)
        B, T, k, h = 2, 10, 3, 5
        x = rng.normal(size=(B, T, k))
        y = rng.normal(size=(B, T, k))
        params = init_params(k, h, rng)
        # Nonzero biases so their gradients are informative too.
        params.bz[:] = rng.normal(0, 0.1, h)
        params.br[:] = rng.normal(0, 0.1, h)
        params.bh[:] = rng.normal(0, 0.1, h)
        params.b_o[:] = rng.normal(0, 0.1, k)
        _, grads = loss_and_grads(params, x, y)
        step = 1e-5
        worst = 0.0
        for name in _WEIGHT_NAMES:
            weight = getattr(params, name)
            flat = weight.reshape(-1)
            for idx in range(flat.size):
                old = flat[idx]
                flat[idx] = old + step
                up, _ = loss_and_grads(params, x, y)
                flat[idx] = old - step
                down, _ = loss_and_grads(params, x, y)
                flat[idx] = old
                fd = (up - down) / (2 * step)
                an = grads[name].reshape(-1)[idx]
                rel = abs(an - fd) / max(abs(an), abs(fd), 1e-8)
                worst = max(worst, rel)
        assert worst < 1e-4


class TestTraining:
    def test_sawtooth_with_trend_mape(self):
        T = 56
        t = np.arange(T)
        signal = lambda idx: 50.0 + 20.0 * ((idx % 7) / 6.0) + 0.1 * idx
        ms = {"m": make_series(signal(t))}
        run = fit_gru_forecast(ms, spec(train=7, seed=42))
        actual = signal(np.arange(T, T + 7))
        pred = run.predictions["m"].values
        mape = float(np.mean(np.abs((actual - pred) / actual))) * 100
        assert mape < 10.0

    def test_insufficient_history(self):
        ms = {"m": make_series(np.arange(7.0))}
        with pytest.raises(InsufficientDataError):
            fit_gru_forecast(ms, spec(train=7))

    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(1)
        ms = {
            "a": make_series(rng.normal(size=30).cumsum() + 30),
            "b": make_series(rng.normal(size=30).cumsum() + 40),
        }
        one = fit_gru_forecast(ms, spec(train=7, seed=9))
        two = fit_gru_forecast(ms, spec(train=7, seed=9))
        for m in ms:
            np.testing.assert_array_equal(one.predictions[m].values, two.predictions[m].values)
        assert one.metadata["loss_curve"] == two.metadata["loss_curve"]

    def test_seed_changes_result(self):
        rng = np.random.default_rng(2)
        ms = {"a": make_series(rng.normal(size=30).cumsum() + 30)}
        one = fit_gru_forecast(ms, spec(train=7, seed=1))
        two = fit_gru_forecast(ms, spec(train=7, seed=2))
        assert not np.array_equal(one.predictions["a"].values, two.predictions["a"].values)

    def test_affine_invariance_through_normalization(self):
        """Quartile normalization absorbs affine input maps, so forecasts
        transform by exactly the same affine map."""
        rng = np.random.default_rng(3)
        base = rng.normal(size=40).cumsum() + 100
        ms = {"a": make_series(base)}
        scaled = {"a": make_series(4.0 * base - 7.0)}
        config = GruConfig(hidden_dim=8, max_epochs=40)
        one = fit_gru_forecast(ms, spec(train=7, seed=5), config)
        two = fit_gru_forecast(scaled, spec(train=7, seed=5), config)
        np.testing.assert_allclose(
            two.predictions["a"].values,
            4.0 * one.predictions["a"].values - 7.0,
            rtol=1e-9,
            atol=1e-9,
        )

    def test_loss_curve_and_early_stop_metadata(self):
        ms = {"m": make_series(np.full(30, 5.0))}
        run = fit_gru_forecast(ms, spec(train=7, seed=0), GruConfig(hidden_dim=4))
        curve = run.metadata["loss_curve"]
        assert 1 <= len(curve) <= 200
        assert run.metadata["epochs"] == len(curve)
        # Constant input normalizes to all zeros: loss starts near zero and
        # the stall rule stops training after ~patience epochs.
        assert len(curve) <= 30
