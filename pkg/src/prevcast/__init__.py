"""prevcast: lexicon-marker prevalence series, peaks, and forecasting.

Turns timestamped text corpora into daily marker prevalence series,
detects high-prevalence peaks per psycho-social dimension, forecasts
marker futures with four interchangeable strategies, and evaluates
forecast quality (MAPE, peak hit rate, paired statistical tests).
"""

__version__ = "0.1.0"

from .corpus import Document, DocumentKind, RecordError, filter_kinds, parse_documents, preprocess_text
from .errors import (
    AllZeroActualsError,
    InputError,
    InsufficientDataError,
    LengthMismatchError,
    LexiconFormatError,
    MissingDayError,
    NoActualPeaksError,
    NonFiniteError,
    NotAPeakError,
    NumericalError,
    PrevcastError,
    TooShortError,
)
from .lexicon import (
    DimensionSpec,
    Lexicon,
    builtin_dimensions_path,
    daily_prevalence,
    load_dimensions,
    load_lexicon,
    match_markers,
)
from .series import (
    DailySeries,
    RobustScaleParams,
    SmoothingSpec,
    StationarityReport,
    gradient,
    linear_detrend,
    robust_normalize,
    rolling_mean,
    stationarity_check,
)
from .peaks import Peak, PeakSet, dimension_peaks, find_candidate_peaks, prominence, select_peaks
from .forecast import (
    ForecastRun,
    ForecastSpec,
    fit_additive_forecast,
    fit_arima_forecast,
    fit_gru_forecast,
    fit_var_forecast,
    granger_causality,
    rolling_forecast,
)
from .evaluation import (
    CompareResult,
    HitWindow,
    MapeResult,
    hit_rate,
    mape,
    normality_test,
    paired_compare,
)

__all__ = [name for name in dir() if not name.startswith("_")]
