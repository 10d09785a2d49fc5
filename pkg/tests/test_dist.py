import math

import numpy as np
import pytest

from halfnormal import dist
from halfnormal.errors import DomainError
from halfnormal.specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    adaptive_quadrature,
    half_min_constant,
    norm_cdf,
)

HN = dist.HalfNormalParams


class TestParams:
    def test_rejects_nonpositive_scale(self):
        with pytest.raises(DomainError):
            HN(0.0, 0.0)
        with pytest.raises(DomainError):
            HN(0.0, -1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError):
            HN(math.inf, 1.0)


class TestSampleType:
    def test_cached_summaries_match_recomputation(self):
        rng = np.random.default_rng(5)
        values = rng.normal(3.0, 2.0, size=37)
        s = dist.Sample(values)
        assert abs(s.mean - values.mean()) < 1e-12
        assert s.minimum == values.min()
        assert abs(s.s2 - values.var(ddof=1)) < 1e-12
        assert abs(s.t1_star - np.abs(values - values.mean()).mean()) < 1e-12
        assert s.minimum <= s.mean

    def test_needs_two_observations(self):
        with pytest.raises(DomainError):
            dist.Sample(np.array([1.0]))

    def test_values_are_readonly(self):
        s = dist.Sample.from_values([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            s.values[0] = 99.0


class TestPdf:
    def test_standard_at_zero(self):
        assert abs(dist.pdf(HN(0.0, 1.0), 0.0) - math.sqrt(2.0 / math.pi)) < 1e-14

    def test_below_support(self):
        assert dist.pdf(HN(10.0, 4.0), 9.99) == 0.0

    def test_direct_substitution(self):
        expected = 0.25 * math.sqrt(2.0 / math.pi) * math.exp(-0.5)
        assert abs(dist.pdf(HN(10.0, 4.0), 14.0) - expected) < 1e-14

    def test_integrates_to_one(self):
        params = HN(10.0, 4.0)
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=200_000)
        total = adaptive_quadrature(
            lambda y: float(dist.pdf(params, y)), params.xi, params.xi + 40 * params.eta, spec
        )
        assert abs(total - 1.0) < 1e-10


class TestMeanVar:
    def test_standard(self):
        mean, var = dist.mean_var(HN(0.0, 1.0))
        assert abs(mean - 0.79788456) < 1e-7
        assert abs(var - 0.36338023) < 1e-7

    def test_reference_parameters(self):
        mean, var = dist.mean_var(HN(10.0, 4.0))
        assert abs(mean - (10.0 + 4.0 * math.sqrt(2.0 / math.pi))) < 1e-12
        assert abs(var - 16.0 * (math.pi - 2.0) / math.pi) < 1e-12
        # Five-decimal reference points.
        assert abs(mean - 13.19154) < 1e-5
        assert abs(var - 5.81408) < 1e-5

    def test_against_monte_carlo(self):
        params = HN(5.0, 2.0)
        s = dist.sample(params, 10**6, seed=17)
        mean, var = dist.mean_var(params)
        se_mean = math.sqrt(var / s.n)
        assert abs(s.mean - mean) < 4 * se_mean
        # Var of the sample variance ~ (mu4 - var^2)/n; a 4-sigma band via
        # the empirical fourth moment.
        dev = s.values - s.mean
        mu4 = float(np.mean(dev**4))
        se_var = math.sqrt(max(mu4 - s.s2**2, 0.0) / s.n)
        assert abs(s.s2 - var) < 4 * se_var


class TestSampling:
    def test_support(self):
        s = dist.sample(HN(10.0, 4.0), 100, seed=1)
        assert s.minimum >= 10.0

    def test_mean_clt_band(self):
        s = dist.sample(HN(0.0, 1.0), 10**6, seed=2)
        _, var = dist.mean_var(HN(0.0, 1.0))
        assert abs(s.mean - math.sqrt(2.0 / math.pi)) < 4 * math.sqrt(var / s.n)

    def test_deterministic(self):
        a = dist.sample(HN(10.0, 4.0), 1000, seed=33)
        b = dist.sample(HN(10.0, 4.0), 1000, seed=33)
        assert np.array_equal(a.values, b.values)

    def test_location_scale_law_exact(self):
        base = dist.sample(HN(0.0, 1.0), 4096, seed=77)
        moved = dist.sample(HN(10.0, 4.0), 4096, seed=77)
        assert np.array_equal(moved.values, 10.0 + 4.0 * base.values)

    def test_kolmogorov_smirnov(self):
        n = 10**5
        s = dist.sample(HN(0.0, 1.0), n, seed=4)
        x = np.sort(s.values)
        cdf = np.array([2.0 * norm_cdf(v) - 1.0 for v in x])
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
        assert ks < 1.63 / math.sqrt(n)

    def test_expected_minimum_matches_constant(self):
        # E(min) = xi + eta * c_n, checked over 1e5 replications.
        params = HN(10.0, 4.0)
        rng = np.random.default_rng(99)
        for n in (2, 5, 10):
            mins = (10.0 + 4.0 * np.abs(rng.standard_normal((10**5, n)))).min(axis=1)
            expected = 10.0 + 4.0 * half_min_constant(n)
            se = mins.std() / math.sqrt(mins.size)
            assert abs(mins.mean() - expected) < 4 * se


class TestBivariate:
    def test_independent_case(self):
        xy = dist.sample_bivariate_normal(0.0, 10**6, seed=6)
        corr = np.corrcoef(xy[:, 0], xy[:, 1])[0, 1]
        assert abs(corr) < 4.0 / math.sqrt(10**6)

    def test_half_correlation(self):
        xy = dist.sample_bivariate_normal(0.5, 10**6, seed=7)
        corr = np.corrcoef(xy[:, 0], xy[:, 1])[0, 1]
        assert abs(corr - 0.5) < 4.0 / math.sqrt(10**6)

    def test_marginal_ks(self):
        n = 10**5
        xy = dist.sample_bivariate_normal(0.5, n, seed=8)
        x = np.sort(xy[:, 0])
        cdf = np.array([norm_cdf(v) for v in x])
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
        assert ks < 1.63 / math.sqrt(n)

    @pytest.mark.parametrize("cov", [-1.0, 1.0, 1.5])
    def test_domain(self, cov):
        with pytest.raises(DomainError):
            dist.sample_bivariate_normal(cov, 10, seed=0)
