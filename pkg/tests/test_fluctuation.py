"""Tests for the truncated limiting law of the log-count fluctuation."""

import math
import warnings

import numpy as np
import pytest

from hyp2col import (
    ModelParams,
    ResourceLimitError,
    cycle_law,
    derive_rng,
    fluctuation_moments,
    fluctuation_samples,
    make_fluctuation_law,
    sample_fluctuation,
    second_moment_ratio,
)
from hyp2col.fluctuation import ecdf

P32 = ModelParams(n=3, k=3, m=2)  # k = 3, d = 2


class TestLawConstruction:
    def test_auto_level_meets_tail_threshold(self):
        law = make_fluctuation_law(P32)
        series = second_moment_ratio(P32)
        assert law.tail < 1e-12
        assert law.tail_ok
        assert series.tail_bound(law.level - 1) >= 1e-12  # smallest such level

    @pytest.mark.filterwarnings("ignore:truncation tail bound")
    def test_explicit_level(self):
        law = make_fluctuation_law(P32, level=30)
        assert law.level == 30
        assert len(law.laws) == 29
        assert law.laws[0].length == 2

    def test_outside_regime_warns(self):
        p = ModelParams.from_density(300, 3, 3.0)
        with pytest.warns(UserWarning):
            make_fluctuation_law(p, level=10)

    def test_zero_density(self):
        p = ModelParams(n=6, k=3, m=0)
        law = make_fluctuation_law(p)
        for seed in range(5):
            assert sample_fluctuation(law, seed) == 0.0


class TestSampling:
    @pytest.mark.filterwarnings("ignore:truncation tail bound")
    def test_deterministic(self):
        law = make_fluctuation_law(P32, level=20)
        a = fluctuation_samples(law, 50, 7)
        b = fluctuation_samples(law, 50, 7)
        assert (a == b).all()
        assert (np.sort(a) == a).all()

    @pytest.mark.filterwarnings("ignore:truncation tail bound")
    def test_batch_uses_per_sample_streams(self):
        # sample i of a batch uses the stream derived from (seed, i)
        law = make_fluctuation_law(P32, level=20)
        batch = fluctuation_samples(law, 3, 11)
        lam = np.array([l.poisson_mean for l in law.laws])
        log1p = np.array([math.log1p(l.planted_bias) for l in law.laws])
        centre = float(
            sum(
                l.poisson_mean * (math.log1p(l.planted_bias) - l.planted_bias)
                for l in law.laws
            )
        )
        direct = sorted(
            float((derive_rng(11, i).poisson(lam) - lam) @ log1p + centre)
            for i in range(3)
        )
        assert np.allclose(batch, direct)

    def test_poisson_mean_overflow_guard(self):
        # at d(k-1) = 4 the mean for length 34 exceeds 1e18
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            law = make_fluctuation_law(P32, level=34)
        with pytest.raises(ResourceLimitError):
            fluctuation_samples(law, 1, 0)

    @pytest.mark.slow
    def test_per_term_unit_exponential_moment(self):
        # for each length, E[exp(X ln(1+bias) - mean*bias)] = 1 (Poisson mgf)
        trials = 200_000
        rng = derive_rng(123)
        for length in (2, 3):
            law = cycle_law(P32, length)
            x = rng.poisson(law.poisson_mean, size=trials)
            vals = np.exp(
                x * math.log1p(law.planted_bias)
                - law.poisson_mean * law.planted_bias
            )
            se = vals.std(ddof=1) / math.sqrt(trials)
            assert abs(vals.mean() - 1.0) <= 4 * se, length

    @pytest.mark.slow
    def test_jensen_sample_mean_nonpositive(self):
        law = make_fluctuation_law(P32, level=30)
        s = fluctuation_samples(law, 100_000, 2024)
        se = s.std(ddof=1) / math.sqrt(len(s))
        assert s.mean() <= 0 + 3 * se

    @pytest.mark.slow
    def test_median_regression_anchor(self):
        law = make_fluctuation_law(P32, level=30)
        s = fluctuation_samples(law, 100_000, 31337)
        med = float(np.median(s))
        assert -0.15 <= med <= 0.05


class TestMoments:
    def test_mean_exp_is_exactly_one(self):
        law = make_fluctuation_law(P32, level=30)
        assert fluctuation_moments(law).mean_exp == 1.0

    def test_mean_exp_sq_matches_series(self):
        law = make_fluctuation_law(P32, level=30)
        series = second_moment_ratio(P32)
        m = fluctuation_moments(law)
        assert m.mean_exp_sq == pytest.approx(
            math.exp(series.partial_log(30)), rel=1e-13
        )
        assert m.mean_exp_sq == pytest.approx(1.07430, abs=5e-5)

    def test_mean_upper_value_and_sign(self):
        law = make_fluctuation_law(P32, level=30)
        m = fluctuation_moments(law)
        # independent partial-sum evaluation
        oracle = sum(
            (4.0**l / (2 * l))
            * (math.log1p((-1.0) ** l / 3.0**l) - (-1.0) ** l / 3.0**l)
            for l in range(2, 31)
        )
        assert m.mean_upper == pytest.approx(oracle, rel=1e-12)
        assert -0.04 < m.mean_upper <= 0.0
        assert m.mean_upper == pytest.approx(-0.0343, abs=2e-3)

    @pytest.mark.filterwarnings("ignore:truncation tail bound")
    def test_truncation_monotone_toward_closed_form(self):
        series = second_moment_ratio(P32)
        prev = 0.0
        for level in range(2, 40):
            law = make_fluctuation_law(P32, level=level)
            cur = math.log(fluctuation_moments(law).mean_exp_sq)
            assert cur >= prev
            assert cur <= series.log_value + 1e-14
            prev = cur
        assert series.log_value - prev < 1e-9


class TestEcdf:
    def test_zero_density_all_zero(self):
        law = make_fluctuation_law(ModelParams(n=6, k=3, m=0))
        s = fluctuation_samples(law, 100, 5)
        assert (s == 0.0).all()

    @pytest.mark.filterwarnings("ignore:truncation tail bound")
    def test_ecdf_at_infinity(self):
        law = make_fluctuation_law(P32, level=10)
        s = fluctuation_samples(law, 500, 5)
        assert ecdf(s, math.inf) == 1.0
        assert ecdf(s, -math.inf) == 0.0
