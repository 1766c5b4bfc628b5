import datetime as dt

import numpy as np
import pytest

from prevcast.series import DailySeries

D0 = dt.date(2020, 3, 1)


@pytest.fixture
def d0() -> dt.date:
    return D0


def make_series(values, start=D0, unit="") -> DailySeries:
    return DailySeries(start, np.asarray(values, dtype=np.float64), unit)


@pytest.fixture
def series_factory():
    return make_series
