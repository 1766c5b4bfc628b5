"""Statistical tests and distribution helpers.

Implements the tests used by the evaluation protocol (Shapiro-Wilk
normality, Wilcoxon signed-rank with an exact small-sample distribution,
paired t-test) on top of a small set of distribution tail functions.
scipy.special supplies the special functions (regularized incomplete
beta, inverse normal CDF); the test logic itself lives here so it can be
validated against reference implementations instead of delegating to
them.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import InputError, NumericalError

__all__ = [
    "norm_cdf",
    "norm_sf",
    "t_sf",
    "f_sf",
    "shapiro_wilk",
    "wilcoxon_signed_rank",
    "paired_t_test",
    "cohens_dz",
    "signed_rank_distribution",
]


# ---------------------------------------------------------------------------
# Distribution tails
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def norm_cdf(x: float) -> float:
    """Standard normal CDF."""
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf(x: float) -> float:
    """Standard normal survival function, accurate in the far tail."""
    return 0.5 * math.erfc(x / _SQRT2)


def t_sf(t: float, df: float) -> float:
    """Survival function of Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isnan(t):
        return math.nan
    x = df / (df + t * t)
    p = 0.5 * float(special.betainc(df / 2.0, 0.5, x))
    return p if t >= 0 else 1.0 - p


def f_sf(f: float, df1: float, df2: float) -> float:
    """Survival function of the F distribution."""
    if df1 <= 0 or df2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0:
        return 1.0
    return float(special.betainc(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f)))


# ---------------------------------------------------------------------------
# Shapiro-Wilk (Royston's AS R94 approximation, n in [3, 5000])
# ---------------------------------------------------------------------------

# Polynomial coefficients from Royston (1995), highest degree first.
_SW_C1 = (-2.706056, 4.434685, -2.071190, -0.147981, 0.221157, 0.0)
_SW_C2 = (-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0)
_SW_C3 = (-0.0006714, 0.025054, -0.39978, 0.5440)
_SW_C4 = (-0.0020322, 0.062767, -0.77857, 1.3822)
_SW_C5 = (0.0038915, -0.083751, -0.31082, -1.5861)
_SW_C6 = (0.0030302, -0.082676, -0.4803)


def _polyval(coefs, x: float) -> float:
    out = 0.0
    for c in coefs:
        out = out * x + c
    return out


def shapiro_wilk(sample) -> tuple[float, float]:
    """Shapiro-Wilk W statistic and p-value for 3 <= n <= 5000.

    Returns ``(W, p)``. Raises ``NumericalError`` on zero-range samples,
    for which W is undefined.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.size
    if n < 3:
        raise InputError("shapiro_wilk requires at least 3 observations")
    if n > 5000:
        raise InputError("shapiro_wilk supports at most 5000 observations")
    if x[-1] == x[0]:
        raise NumericalError("shapiro_wilk undefined for zero-range sample")

    # Expected normal order statistics (Blom approximation) and weights.
    i = np.arange(1, n + 1, dtype=np.float64)
    m = special.ndtri((i - 0.375) / (n + 0.25))
    ssq_m = float(m @ m)
    rsn = 1.0 / math.sqrt(n)
    a = np.zeros(n, dtype=np.float64)
    # Weight of the largest order statistic; the rest follow by symmetry.
    a_n = m[-1] / math.sqrt(ssq_m) + _polyval(_SW_C1, rsn)
    if n > 5:
        a_n1 = m[-2] / math.sqrt(ssq_m) + _polyval(_SW_C2, rsn)
        fac = math.sqrt(
            (ssq_m - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2)
            / (1.0 - 2.0 * a_n**2 - 2.0 * a_n1**2)
        )
        a[2:-2] = m[2:-2] / fac
        a[-2], a[1] = a_n1, -a_n1
    else:
        fac = math.sqrt((ssq_m - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n**2))
        if n > 3:
            a[1:-1] = m[1:-1] / fac
    a[-1], a[0] = a_n, -a_n

    xc = x - x.mean()
    w_stat = float(a @ x) ** 2 / float(xc @ xc)
    w_stat = min(w_stat, 1.0)

    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w_stat)) - math.asin(math.sqrt(0.75)))
        return w_stat, min(max(p, 0.0), 1.0)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        if gamma - math.log(1.0 - w_stat) <= 0.0:
            return w_stat, 1e-99
        y = -math.log(gamma - math.log(1.0 - w_stat))
        mu = _polyval(_SW_C3, float(n))
        sigma = math.exp(_polyval(_SW_C4, float(n)))
    else:
        y = math.log(1.0 - w_stat)
        ln_n = math.log(n)
        mu = _polyval(_SW_C5, ln_n)
        sigma = math.exp(_polyval(_SW_C6, ln_n))
    return w_stat, norm_sf((y - mu) / sigma)


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank
# ---------------------------------------------------------------------------


def signed_rank_distribution(n: int) -> np.ndarray:
    """Counts of subsets of {1..n} by rank sum.

    Entry ``k`` is the number of sign assignments with positive-rank sum
    ``k``; the total is ``2**n``. This is the exact null distribution of
    the W+ statistic for ``n`` untied nonzero differences.
    """
    max_sum = n * (n + 1) // 2
    counts = np.zeros(max_sum + 1, dtype=np.float64)
    counts[0] = 1.0
    for rank in range(1, n + 1):
        counts[rank:] += counts[: max_sum + 1 - rank].copy()
    return counts


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks (1-based) with ties assigned their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def wilcoxon_signed_rank(
    diffs, exact_max_n: int = 25
) -> tuple[float, float, str]:
    """Two-sided Wilcoxon signed-rank test on a vector of differences.

    Zero differences are dropped. The exact distribution is used when the
    remaining sample has at most ``exact_max_n`` untied absolute values;
    otherwise a normal approximation with continuity and tie corrections
    applies. Returns ``(w_plus, p_value, method)`` where method is
    ``"exact"`` or ``"normal"``.
    """
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return 0.0, 1.0, "exact"
    abs_d = np.abs(d)
    ranks = _average_ranks(abs_d)
    w_plus = float(ranks[d > 0].sum())
    has_ties = np.unique(abs_d).size < n

    if n <= exact_max_n and not has_ties:
        counts = signed_rank_distribution(n)
        total = 2.0**n
        w = int(round(w_plus))
        cdf = counts[: w + 1].sum() / total
        sf = counts[w:].sum() / total
        p = min(1.0, 2.0 * min(cdf, sf))
        return w_plus, p, "exact"

    mean_w = n * (n + 1) / 4.0
    var_w = n * (n + 1) * (2 * n + 1) / 24.0
    # Tie correction on the variance.
    _, tie_counts = np.unique(abs_d, return_counts=True)
    var_w -= (tie_counts.astype(np.float64) ** 3 - tie_counts).sum() / 48.0
    if var_w <= 0:
        return w_plus, 1.0, "normal"
    dev = w_plus - mean_w
    # Continuity correction shrinks the deviation by half a unit.
    dev -= 0.5 * np.sign(dev)
    z = dev / math.sqrt(var_w)
    return w_plus, min(1.0, 2.0 * norm_sf(abs(z))), "normal"


# ---------------------------------------------------------------------------
# Paired t-test and effect size
# ---------------------------------------------------------------------------


def paired_t_test(diffs) -> tuple[float, float]:
    """Two-sided paired t-test on precomputed differences.

    Returns ``(t, p)``. Undefined (raises ``NumericalError``) when the
    differences have zero variance.
    """
    d = np.asarray(diffs, dtype=np.float64)
    n = d.size
    if n < 2:
        raise InputError("paired_t_test requires at least 2 differences")
    sd = d.std(ddof=1)
    if sd == 0.0:
        raise NumericalError("paired_t_test undefined for zero-variance differences")
    t = d.mean() / (sd / math.sqrt(n))
    return float(t), min(1.0, 2.0 * t_sf(abs(t), n - 1))


def cohens_dz(diffs) -> float:
    """Paired-samples effect size: mean(d) / sd(d, ddof=1).

    Returns signed infinity for nonzero constant differences and 0.0 when
    every difference is zero.
    """
    d = np.asarray(diffs, dtype=np.float64)
    sd = d.std(ddof=1) if d.size > 1 else 0.0
    mean = d.mean()
    if sd == 0.0:
        if mean == 0.0:
            return 0.0
        return math.inf if mean > 0 else -math.inf
    return float(mean / sd)
