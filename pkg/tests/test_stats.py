import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ramanujan_lab.exceptions import DegenerateSampleError, FitDomainError
from ramanujan_lab.spectra import SpectralSummary
from ramanujan_lab.stats import (
    CHI2_CRIT_01,
    CHI2_CRIT_05,
    FitReport,
    PowerLawRegressor,
    Standardizer,
    chi_square_gof,
    correlation,
    fit_exponents,
    independence_product_check,
    percent_ramanujan,
    standardize,
    threshold_sigma_distance,
    z_mass_left,
    z_statistic,
)
from ramanujan_lab.tracy_widom import reference_distribution

finite = st.floats(-1e3, 1e3, allow_nan=False)
samples = arrays(np.float64, st.integers(3, 50), elements=finite).filter(
    lambda x: np.std(x) > 1e-3
)


class TestStandardize:
    def test_small(self):
        np.testing.assert_allclose(standardize([1, 2, 3]).values, [-1, 0, 1])

    def test_constant(self):
        with pytest.raises(DegenerateSampleError):
            standardize([5, 5, 5])

    @given(samples)
    @settings(max_examples=80, deadline=None)
    def test_mean_zero_and_idempotent(self, x):
        z = standardize(x).values
        assert abs(z.mean()) < 1e-12
        np.testing.assert_allclose(standardize(z).values, z, atol=1e-12)

    def test_estimator_round_trip(self):
        x = np.array([2.0, 4.0, 9.0])
        sc = Standardizer().fit(x)
        np.testing.assert_allclose(sc.inverse_transform(sc.transform(x)), x)
        assert sc.get_params() == {"ddof": 1}


class TestChiSquare:
    def test_one_bin_adversarial(self):
        n = 200
        report = chi_square_gof(np.full(n, -50.0), reference_distribution("normal"))
        e = n / 20
        assert report.statistic == pytest.approx((n - e) ** 2 / e + 19 * e)

    def test_thresholds(self):
        assert 29 < CHI2_CRIT_05 < 31 < CHI2_CRIT_01

    def test_null_mean(self):
        ref = reference_distribution("normal")
        rng = np.random.default_rng(8)
        stats = [chi_square_gof(rng.standard_normal(1000), ref).statistic for _ in range(200)]
        assert np.mean(stats) == pytest.approx(19, abs=1.0)

    def test_too_small(self):
        with pytest.raises(ValueError):
            chi_square_gof(np.zeros(10), reference_distribution("normal"))

    def test_bins_crit_scipy(self):
        from scipy.stats import chi2

        assert chi2.ppf(0.95, 19) == pytest.approx(CHI2_CRIT_05, abs=1e-4)
        assert chi2.ppf(0.99, 19) == pytest.approx(CHI2_CRIT_01, abs=1e-4)


class TestZ:
    @pytest.mark.parametrize(
        "theta, z", [(0.477, -2.700), (0.522, 0.149), (0.551, 1.984)]
    )
    def test_table3(self, theta, z):
        assert z_statistic(theta, 0.519652, 1000) == pytest.approx(z, abs=1e-3)

    def test_normal_column(self):
        assert z_statistic(0.477, 0.5, 1000) == pytest.approx(-1.455, abs=1e-3)

    def test_zero(self):
        assert z_statistic(0.3, 0.3, 50) == 0.0

    def test_strict_below(self):
        r = z_mass_left([1.0, 2.0, 3.0], 0.5)
        assert r.theta_obs == pytest.approx(1 / 3)


class TestCorrelation:
    def test_signs(self):
        x = np.arange(10.0)
        assert correlation(x, x).r == pytest.approx(1.0)
        assert correlation(x, -x).r == pytest.approx(-1.0)

    def test_independent(self):
        rng = np.random.default_rng(0)
        assert abs(correlation(rng.standard_normal(10000), rng.standard_normal(10000)).r) < 0.05

    def test_constant(self):
        with pytest.raises(DegenerateSampleError):
            correlation([1, 1, 1], [1, 2, 3])

    @given(samples, st.floats(0.1, 10), st.floats(-10, 10))
    @settings(max_examples=60, deadline=None)
    def test_bounds_and_affine(self, x, a, b):
        y = np.sin(x) + 0.1 * x
        if np.std(y) < 1e-6:
            return
        r = correlation(x, y).r
        assert -1 <= r <= 1
        assert correlation(a * x + b, y).r == pytest.approx(r, abs=1e-9)


class TestFits:
    Ns = np.array([26, 50, 100, 252, 632, 1002, 2000, 5022], dtype=float)

    def test_exact(self):
        means = 2 * math.sqrt(2) - 0.5 * self.Ns**-0.75
        stds = 1.3 * self.Ns**-0.7
        fit = fit_exponents(self.Ns, means, stds, 3)
        assert fit.m == pytest.approx(-0.75, abs=1e-10)
        assert fit.c_mu == pytest.approx(-0.5, abs=1e-10)
        assert fit.s == pytest.approx(-0.7, abs=1e-12)
        assert fit.c_sigma == pytest.approx(1.3, abs=1e-12)
        assert np.max(np.abs(fit.residuals_std)) < 1e-12

    def test_noisy(self):
        rng = np.random.default_rng(2)
        noise = np.exp(rng.normal(0, 0.01, (2, len(self.Ns))))
        means = 2 * math.sqrt(2) - 0.5 * self.Ns**-0.75 * noise[0]
        stds = 1.3 * self.Ns**-0.7 * noise[1]
        fit = fit_exponents(self.Ns, means, stds, 3)
        assert abs(fit.m + 0.75) < 0.02 and abs(fit.s + 0.7) < 0.02

    def test_domain(self):
        with pytest.raises(FitDomainError):
            fit_exponents([10, 20, 30], [2.9, 2.7, 2.8], [0.1, 0.1, 0.1], 3)

    def test_regressor_predict(self):
        reg = PowerLawRegressor().fit(self.Ns, 3 * self.Ns**0.5)
        np.testing.assert_allclose(reg.predict([4.0]), [6.0])


class TestThreshold:
    def test_arithmetic(self):
        fit = FitReport(-0.5, -0.75, 1.3, -0.7, 3, None, None)
        assert threshold_sigma_distance(fit, math.e) == pytest.approx(0.5 / 1.3 * math.exp(-0.05))

    def test_equal_exponents(self):
        fit = FitReport(-0.5, -0.7, 1.3, -0.7, 3, None, None)
        assert threshold_sigma_distance(fit, 10) == pytest.approx(threshold_sigma_distance(fit, 1e6))

    def test_vanishes(self):
        fit = FitReport(-0.5, -0.8, 1.3, -0.7, 3, None, None)
        d = [threshold_sigma_distance(fit, n) for n in (1e2, 1e6, 1e30)]
        assert d[0] > d[1] > d[2] and d[2] < 1e-3


def summary(lp, lm, d=3):
    return SpectralSummary.from_extremes(lp, lm, d)


class TestRamanujanFractions:
    def test_k33(self):
        assert percent_ramanujan([summary(0, 0)] * 100, 3) == 1.0

    def test_single_fail(self):
        assert percent_ramanujan([summary(3.0, -1.0)], 3) == 0.0

    def test_mixed(self):
        assert percent_ramanujan([summary(2.8, -1), summary(2.9, -1)], 3) == 0.5

    def test_skips_unconverged(self):
        assert percent_ramanujan([summary(2.8, -1), SpectralSummary.failed()], 3) == 1.0

    def test_empty(self):
        with pytest.raises(ValueError):
            percent_ramanujan([], 3)

    def test_independence_all_ramanujan(self):
        r = independence_product_check([summary(1, -1)] * 10, 3)
        assert (r.p_plus, r.p_minus, r.p_product, r.p_joint) == (1, 1, 1, 1)

    def test_independence_correlated(self):
        rng = np.random.default_rng(0)
        lp = rng.uniform(2.6, 3.0, 500)
        r = independence_product_check([summary(x, -x) for x in lp], 3)
        assert r.p_joint == pytest.approx(min(r.p_plus, r.p_minus))
        assert r.p_joint != pytest.approx(r.p_product)

    def test_independence_independent(self):
        rng = np.random.default_rng(1)
        lp = rng.uniform(2.6, 3.0, 2000)
        lm = -rng.uniform(2.6, 3.0, 2000)
        r = independence_product_check([summary(a, b) for a, b in zip(lp, lm)], 3)
        assert abs(r.p_joint - r.p_product) < 3 * r.standard_error
