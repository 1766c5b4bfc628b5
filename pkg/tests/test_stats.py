import itertools
import math

import numpy as np
import pytest
from scipy import stats as sps

from prevcast.errors import InputError, NumericalError
from prevcast.stats import (
    cohens_dz,
    f_sf,
    norm_cdf,
    norm_sf,
    paired_t_test,
    shapiro_wilk,
    signed_rank_distribution,
    t_sf,
    wilcoxon_signed_rank,
)


class TestDistributionTails:
    def test_norm_cdf_sf(self):
        for x in (-3.0, -0.5, 0.0, 1.2, 4.0):
            assert norm_cdf(x) == pytest.approx(sps.norm.cdf(x), abs=1e-14)
            assert nor_sf_close(x)

    def test_t_sf_matches_scipy(self):
        for t in (-4.0, -1.0, 0.0, 0.7, 2.5, 8.0):
            for df in (1, 3, 10, 29, 200):
                assert t_sf(t, df) == pytest.approx(sps.t.sf(t, df), rel=1e-10, abs=1e-14)

    def test_f_sf_matches_scipy(self):
        for f in (0.1, 1.0, 2.5, 10.0):
            for d1, d2 in ((1, 10), (2, 30), (5, 5), (3, 100)):
                assert f_sf(f, d1, d2) == pytest.approx(sps.f.sf(f, d1, d2), rel=1e-10)


def nor_sf_close(x):
    return norm_sf(x) == pytest.approx(sps.norm.sf(x), rel=1e-12, abs=1e-300)


class TestShapiroWilk:
    def test_matches_scipy_on_fixed_vectors(self):
        """Reference-implementation oracle at 1e-6, across sizes and shapes."""
        rng = np.random.default_rng(2024)
        cases = []
        for n in (8, 9, 11, 12, 20, 35, 50, 120, 500, 5000):
            cases.append(rng.normal(size=n))
            cases.append(rng.exponential(size=n))
        assert len(cases) == 20
        for x in cases:
            w_mine, p_mine = shapiro_wilk(x)
            w_ref, p_ref = sps.shapiro(x)
            assert w_mine == pytest.approx(w_ref, abs=1e-7)
            assert p_mine == pytest.approx(p_ref, abs=1e-6)

    def test_size_monte_carlo(self):
        """Normal samples should rarely be rejected at 0.05."""
        hits = 0
        for seed in range(50):
            x = np.random.default_rng(seed).normal(size=100)
            _, p = shapiro_wilk(x)
            hits += p > 0.05
        assert hits >= 45

    def test_power_against_exponential(self):
        hits = 0
        for seed in range(50):
            x = np.random.default_rng(seed).exponential(size=100)
            _, p = shapiro_wilk(x)
            hits += p < 0.05
        assert hits >= 45

    def test_bounds(self):
        with pytest.raises(InputError):
            shapiro_wilk(np.arange(2.0))
        with pytest.raises(InputError):
            shapiro_wilk(np.arange(5001.0))
        with pytest.raises(NumericalError):
            shapiro_wilk(np.full(20, 3.0))


def wilcoxon_enumeration_p(diffs) -> float:
    """Oracle: exact two-sided p by enumerating all 2^n sign assignments."""
    d = np.asarray(diffs, dtype=float)
    d = d[d != 0]
    n = d.size
    ranks = sps.rankdata(np.abs(d))
    w_obs = ranks[d > 0].sum()
    total = n * (n + 1) / 2
    w_all = []
    for signs in itertools.product((0, 1), repeat=n):
        w_all.append(sum(r for r, s in zip(ranks, signs) if s))
    w_all = np.asarray(w_all)
    cdf = np.mean(w_all <= w_obs)
    sf = np.mean(w_all >= w_obs)
    return min(1.0, 2.0 * min(cdf, sf))


class TestWilcoxon:
    def test_distribution_matches_enumeration(self):
        for n in range(1, 11):
            counts = signed_rank_distribution(n)
            total = n * (n + 1) // 2
            brute = np.zeros(total + 1)
            for signs in itertools.product((0, 1), repeat=n):
                brute[sum(r for r, s in zip(range(1, n + 1), signs) if s)] += 1
            np.testing.assert_array_equal(counts, brute)

    def test_exact_p_matches_enumeration(self):
        rng = np.random.default_rng(5)
        for n in range(4, 11):
            for _ in range(5):
                d = rng.normal(0.4, 1.0, size=n)
                _, p, method = wilcoxon_signed_rank(d)
                assert method == "exact"
                assert p == pytest.approx(wilcoxon_enumeration_p(d), abs=1e-12)

    def test_exact_p_matches_scipy(self):
        rng = np.random.default_rng(6)
        for n in (8, 12, 20, 25):
            d = rng.normal(0.3, 1.0, size=n)
            _, p, _ = wilcoxon_signed_rank(d)
            assert p == pytest.approx(sps.wilcoxon(d, mode="exact").pvalue, abs=1e-12)

    def test_normal_approximation_matches_scipy(self):
        rng = np.random.default_rng(7)
        d = rng.normal(0.2, 1.0, size=60)
        _, p, method = wilcoxon_signed_rank(d)
        assert method == "normal"
        assert p == pytest.approx(
            sps.wilcoxon(d, mode="approx", correction=True).pvalue, rel=1e-9
        )

    def test_ties_use_normal_approximation(self):
        d = np.array([1.0, -1.0, 2.0, 2.0, -3.0, 4.0, 5.0, -2.0, 1.0, -1.0])
        _, _, method = wilcoxon_signed_rank(d)
        assert method == "normal"

    def test_zero_differences_dropped(self):
        d = np.array([0.0, 0.0, 1.0, -2.0, 3.0, -1.5, 2.5, 0.0, -0.5, 1.25])
        w_mine, p_mine, method = wilcoxon_signed_rank(d)
        assert method == "exact"
        ref = sps.wilcoxon(d[d != 0], mode="exact")
        assert p_mine == pytest.approx(ref.pvalue, abs=1e-12)

    def test_all_zero(self):
        w, p, _ = wilcoxon_signed_rank(np.zeros(10))
        assert (w, p) == (0.0, 1.0)


class TestPairedT:
    def test_matches_scipy_on_fixed_vectors(self):
        rng = np.random.default_rng(11)
        for n in (8, 10, 15, 30, 100):
            for _ in range(4):
                a = rng.normal(size=n)
                b = a + rng.normal(0.3, 0.5, size=n)
                t_mine, p_mine = paired_t_test(a - b)
                ref = sps.ttest_rel(a, b)
                assert t_mine == pytest.approx(ref.statistic, rel=1e-12)
                assert p_mine == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-15)

    def test_zero_variance_raises(self):
        with pytest.raises(NumericalError):
            paired_t_test(np.full(10, 2.0))


class TestCohensDz:
    def test_hand_cases(self):
        # mean/sd(ddof=1) computed by hand for five fixed vectors.
        cases = [
            ([1.0, 2.0, 3.0], 2.0 / 1.0),
            ([5.0, 5.0, 5.0, 7.0], 5.5 / 1.0),
            ([-1.0, 1.0], 0.0 / math.sqrt(2.0)),
            ([2.0, 4.0], 3.0 / math.sqrt(2.0)),
            ([0.0, 0.0, 6.0], 2.0 / math.sqrt(12.0)),
        ]
        for values, expected in cases:
            assert cohens_dz(values) == pytest.approx(expected, abs=1e-12)

    def test_degenerate(self):
        assert cohens_dz(np.zeros(5)) == 0.0
        assert cohens_dz(np.full(5, 3.0)) == math.inf
        assert cohens_dz(np.full(5, -3.0)) == -math.inf

    def test_sign_flip(self):
        rng = np.random.default_rng(3)
        d = rng.normal(0.5, 1.0, size=20)
        assert cohens_dz(d) == pytest.approx(-cohens_dz(-d), rel=1e-12)
