import numpy as np
import pytest

from prevcast.errors import InsufficientDataError
from prevcast.forecast import ForecastSpec, fit_arima_forecast
from prevcast.forecast.arima import ArimaOrder, _yule_walker

from conftest import make_series


def spec(train, horizon=7):
    return ForecastSpec(strategy="arima", train_days=train, horizon_days=horizon)


class TestDeterministicRecursion:
    def test_pure_ar1_decay(self):
        x = 0.8 ** np.arange(30)
        run = fit_arima_forecast(make_series(x), spec(30), order=(1, 0, 0))
        expected = x[-1] * 0.8 ** np.arange(1, 8)
        np.testing.assert_allclose(run.predictions["series"].values, expected, rtol=1e-8)
        model = run.metadata["model"]
        assert model.phi[0] == pytest.approx(0.8, abs=1e-6)
        assert model.c == pytest.approx(0.0, abs=1e-7)

    def test_forecast_equals_explicit_ar_recursion(self):
        """With q=0 and d=0 the forecast must equal the hand recursion on
        the last p observations."""
        rng = np.random.default_rng(8)
        x = np.zeros(60)
        for t in range(1, 60):
            x[t] = 1.0 + 0.5 * x[t - 1] + rng.normal(0, 0.2)
        run = fit_arima_forecast(make_series(x), spec(60), order=(2, 0, 0))
        model = run.metadata["model"]
        hist = list(x)
        manual = []
        for _ in range(7):
            val = model.c + model.phi[0] * hist[-1] + model.phi[1] * hist[-2]
            hist.append(val)
            manual.append(val)
        np.testing.assert_allclose(run.predictions["series"].values, manual, rtol=1e-12)


class TestRecovery:
    def test_ar1_phi_recovery_over_seeds(self):
        phis = []
        for seed in range(20):
            rng = np.random.default_rng(seed)
            x = np.zeros(200)
            for t in range(1, 200):
                x[t] = 0.8 * x[t - 1] + rng.normal(0, 0.1)
            run = fit_arima_forecast(make_series(x), spec(200), order=(1, 0, 0))
            phis.append(run.metadata["model"].phi[0])
        assert 0.7 <= float(np.median(phis)) <= 0.9


class TestOrderSelection:
    def test_infeasible_orders_excluded(self):
        # Window of 5: p=3,q=3 needs >= 8 points and must drop out of the
        # grid, while small orders stay feasible.
        rng = np.random.default_rng(1)
        x = rng.normal(size=30)
        run = fit_arima_forecast(make_series(x), spec(5))
        p, d, q = run.metadata["order"]
        assert p + d + q + 2 <= 5

    def test_three_point_window_fits_smallest_order(self):
        # Orders needing more than 3 points drop out of the grid; the
        # mean-only model is still feasible.
        run = fit_arima_forecast(make_series(np.arange(3.0)), spec(3))
        p, d, q = run.metadata["order"]
        assert p + d + q + 2 <= 3

    def test_window_shorter_than_train_days(self):
        with pytest.raises(InsufficientDataError):
            fit_arima_forecast(make_series(np.arange(5.0)), spec(10))

    def test_differencing_on_random_walk(self):
        rng = np.random.default_rng(4)
        x = np.cumsum(rng.normal(size=80)) + 100
        run = fit_arima_forecast(make_series(x), spec(80))
        assert run.metadata["order"][1] >= 1 or run.metadata.get("detrended")

    def test_trend_detrended_or_differenced(self):
        rng = np.random.default_rng(9)
        x = 0.5 * np.arange(60) + rng.normal(0, 0.3, size=60)
        run = fit_arima_forecast(make_series(x), spec(60))
        # Forecast must keep climbing roughly along the trend.
        pred = run.predictions["series"].values
        assert pred[-1] > x[-10:].mean()


class TestAffineEquivariance:
    def test_scale_and_shift(self):
        rng = np.random.default_rng(12)
        x = np.zeros(120)
        for t in range(1, 120):
            x[t] = 0.6 * x[t - 1] + rng.normal(0, 0.5)
        base = fit_arima_forecast(make_series(x), spec(120), order=(1, 0, 0))
        c, b = 3.5, 20.0
        moved = fit_arima_forecast(make_series(c * x + b), spec(120), order=(1, 0, 0))
        np.testing.assert_allclose(
            moved.predictions["series"].values,
            c * base.predictions["series"].values + b,
            rtol=1e-5,
            atol=1e-6 * (1 + abs(b)),
        )


class TestFallback:
    def test_yule_walker_matches_autocovariance_equations(self):
        rng = np.random.default_rng(3)
        x = np.zeros(500)
        for t in range(1, 500):
            x[t] = 0.7 * x[t - 1] + rng.normal()
        phi, c = _yule_walker(x, 1)
        xc = x - x.mean()
        r0 = xc @ xc / x.size
        r1 = xc[:-1] @ xc[1:] / x.size
        assert phi[0] == pytest.approx(r1 / r0, rel=1e-10)
        assert c == pytest.approx(x.mean() * (1 - phi[0]), rel=1e-10)


class TestArimaOrderType:
    def test_coefficient_length_validation(self):
        with pytest.raises(ValueError):
            ArimaOrder(p=2, d=0, q=0, phi=(0.5,), theta=(), c=0.0)

    def test_stability_check(self):
        stable = ArimaOrder(p=1, d=0, q=0, phi=(0.5,), theta=(), c=0.0)
        unstable = ArimaOrder(p=1, d=0, q=0, phi=(1.1,), theta=(), c=0.0)
        assert stable.ar_is_stable()
        assert not unstable.ar_is_stable()

    def test_unstable_fit_warns(self):
        x = np.arange(1.0, 31.0) ** 2  # strongly explosive in AR terms
        with pytest.warns(RuntimeWarning, match="unit circle"):
            fit_arima_forecast(make_series(x), spec(30), order=(1, 0, 0))


class TestDeterminism:
    def test_bit_identical_runs(self):
        rng = np.random.default_rng(77)
        x = rng.normal(size=60).cumsum() + 50
        a = fit_arima_forecast(make_series(x), spec(21))
        b = fit_arima_forecast(make_series(x), spec(21))
        np.testing.assert_array_equal(
            a.predictions["series"].values, b.predictions["series"].values
        )
        assert a.metadata["order"] == b.metadata["order"]
