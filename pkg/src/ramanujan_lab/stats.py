"""Statistical pipeline for extremal-eigenvalue samples.

Standardization to mean 0 / variance 1, chi-square goodness of fit on
equiprobable bins, the mass-left-of-mean z-test, the sample correlation of
``lambda_plus`` and ``lambda_minus``, power-law exponent fits of the mean
and standard deviation against ``N``, and Ramanujan fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_sample
from .exceptions import DegenerateSampleError, FitDomainError
from .spectra import ramanujan_bound

CHI2_BINS = 20
# chi-square(19) upper quantiles at alpha = .05 and .01
CHI2_CRIT_05 = 30.1435
CHI2_CRIT_01 = 36.1908


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean: float
    std: float
    values: np.ndarray = field(repr=False)


class Standardizer(TransformerMixin, BaseEstimator):
    """Center and scale a 1-D sample using the ``n - 1`` standard deviation."""

    def __init__(self, ddof=1):
        self.ddof = ddof

    def fit(self, X, y=None):
        x = check_sample(X, "X", min_size=2)
        scale = float(np.std(x, ddof=self.ddof))
        if not scale > 0.0:
            raise DegenerateSampleError("sample has zero variance")
        self.mean_ = float(np.mean(x))
        self.scale_ = scale
        self.n_samples_seen_ = len(x)
        return self

    def transform(self, X):
        check_is_fitted(self)
        return (check_sample(X, "X") - self.mean_) / self.scale_

    def inverse_transform(self, X):
        check_is_fitted(self)
        return check_sample(X, "X") * self.scale_ + self.mean_


def standardize(values):
    """``(x - mean) / std`` with the ``n - 1`` denominator."""
    scaler = Standardizer().fit(values)
    return SampleStats(
        n=scaler.n_samples_seen_,
        mean=scaler.mean_,
        std=scaler.scale_,
        values=scaler.transform(values),
    )


@dataclass(frozen=True)
class ChiSquareReport:
    statistic: float
    observed: np.ndarray = field(repr=False)
    expected: float = 0.0
    bins: int = CHI2_BINS
    reference: str = ""
    crit_05: float = CHI2_CRIT_05
    crit_01: float = CHI2_CRIT_01

    @property
    def dof(self):
        return self.bins - 1

    @property
    def passes_05(self):
        return self.statistic < self.crit_05

    @property
    def passes_01(self):
        return self.statistic < self.crit_01


def chi_square_gof(sample, reference, bins=CHI2_BINS):
    """Pearson chi-square of a standardized sample against a reference.

    Bin edges are the ``k / bins`` quantiles of ``reference`` so every bin
    expects ``n / bins`` points. ``sample`` may be a ``SampleStats`` or an
    already standardized array.
    """
    values = sample.values if isinstance(sample, SampleStats) else check_sample(sample)
    n = len(values)
    if n < 100:
        raise ValueError("chi-square test needs at least 100 observations")
    edges = np.asarray(reference.ppf(np.arange(1, bins) / bins), dtype=float)
    observed = np.bincount(np.searchsorted(edges, values, side="right"), minlength=bins)
    expected = n / bins
    stat = float(np.sum((observed - expected) ** 2) / expected)
    name = getattr(reference, "name", repr(reference))
    if bins == CHI2_BINS:
        return ChiSquareReport(stat, observed, expected, bins, name)
    return ChiSquareReport(
        stat, observed, expected, bins, name,
        crit_05=float(chi2.ppf(0.95, bins - 1)),
        crit_01=float(chi2.ppf(0.99, bins - 1)),
    )


@dataclass(frozen=True)
class ZReport:
    theta_obs: float
    theta_pred: float
    n: int
    z: float


def z_statistic(theta_obs, theta_pred, n):
    if not 0.0 < theta_pred < 1.0:
        raise ValueError("theta_pred must lie in (0, 1)")
    return (theta_obs - theta_pred) / math.sqrt(theta_pred * (1.0 - theta_pred) / n)


def z_mass_left(values, theta_pred, n=None):
    """z-test of the fraction of ``values`` strictly below their own mean."""
    x = check_sample(values)
    n = len(x) if n is None else int(n)
    theta_obs = float(np.count_nonzero(x < x.mean())) / n
    return ZReport(theta_obs, float(theta_pred), n, float(z_statistic(theta_obs, theta_pred, n)))


@dataclass(frozen=True)
class CorrelationReport:
    r: float
    s_xx: float
    s_yy: float
    s_xy: float


def correlation(xs, ys):
    """Sample correlation ``S_xy / sqrt(S_xx S_yy)`` from centered sums."""
    x = check_sample(xs, "xs", min_size=2)
    y = check_sample(ys, "ys", min_size=2)
    if len(x) != len(y):
        raise ValueError("xs and ys must have equal length")
    dx = x - x.mean()
    dy = y - y.mean()
    s_xx, s_yy, s_xy = float(dx @ dx), float(dy @ dy), float(dx @ dy)
    if s_xx == 0.0 or s_yy == 0.0:
        raise DegenerateSampleError("correlation undefined for a constant sample")
    r = s_xy / math.sqrt(s_xx * s_yy)
    return CorrelationReport(min(1.0, max(-1.0, r)), s_xx, s_yy, s_xy)


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """Fit ``y = prefactor * N ** exponent`` by least squares in log-log space."""

    def fit(self, X, y):
        n = check_sample(X, "N", min_size=2)
        y = check_sample(y, "y", min_size=2)
        if len(n) != len(y):
            raise ValueError("N and y must have equal length")
        if np.any(n <= 0) or np.any(y <= 0):
            raise FitDomainError("power-law fit needs positive N and y")
        slope, intercept = np.polyfit(np.log(n), np.log(y), 1)
        self.exponent_ = float(slope)
        self.log_prefactor_ = float(intercept)
        self.prefactor_ = float(math.exp(intercept))
        self.residuals_ = np.log(y) - (intercept + slope * np.log(n))
        return self

    def predict(self, X):
        check_is_fitted(self)
        n = check_sample(X, "N")
        return self.prefactor_ * n**self.exponent_


@dataclass(frozen=True)
class FitReport:
    """Fitted ``mean ~ 2 sqrt(d-1) + c_mu N^m`` and ``std ~ c_sigma N^s``."""

    c_mu: float
    m: float
    c_sigma: float
    s: float
    degree: int
    residuals_mean: np.ndarray = field(repr=False)
    residuals_std: np.ndarray = field(repr=False)


def fit_exponents(Ns, means, stds, d):
    """Log-log least-squares fits of the mean gap and the spread.

    The mean model needs ``2 sqrt(d-1) - mean > 0`` at every point so its
    logarithm exists (``c_mu < 0``).
    """
    n = check_sample(Ns, "Ns", min_size=3)
    means = check_sample(means, "means", min_size=3)
    stds = check_sample(stds, "stds", min_size=3)
    if not len(n) == len(means) == len(stds):
        raise ValueError("Ns, means and stds must have equal length")
    gap = ramanujan_bound(d) - means
    if np.any(gap <= 0):
        raise FitDomainError("a sample mean reaches 2 sqrt(d-1); c_mu < 0 is violated")
    if np.any(stds <= 0):
        raise FitDomainError("standard deviations must be positive")
    mean_fit = PowerLawRegressor().fit(n, gap)
    std_fit = PowerLawRegressor().fit(n, stds)
    return FitReport(
        c_mu=-mean_fit.prefactor_,
        m=mean_fit.exponent_,
        c_sigma=std_fit.prefactor_,
        s=std_fit.exponent_,
        degree=int(d),
        residuals_mean=mean_fit.residuals_,
        residuals_std=std_fit.residuals_,
    )


def threshold_sigma_distance(fit, N):
    """Standard deviations between the sample mean and ``2 sqrt(d-1)``."""
    return (-fit.c_mu / fit.c_sigma) * float(N) ** (fit.m - fit.s)


def _converged(summaries):
    return [s for s in summaries if s.converged]


def percent_ramanujan(summaries, d):
    """Fraction of converged summaries with ``lambda_abs <= 2 sqrt(d-1)``.

    Unconverged summaries are left out of both numerator and denominator.
    """
    summaries = list(summaries)
    if not summaries:
        raise ValueError("no summaries given")
    ok = _converged(summaries)
    if not ok:
        raise ValueError("no converged summaries")
    bound = ramanujan_bound(d)
    return sum(s.lambda_abs <= bound for s in ok) / len(ok)


@dataclass(frozen=True)
class IndependenceReport:
    p_plus: float
    p_minus: float
    p_product: float
    p_joint: float
    n: int

    @property
    def standard_error(self):
        p = self.p_product
        return math.sqrt(p * (1.0 - p) / self.n)


def independence_product_check(summaries, d):
    """Compare ``P(lp <= T) P(|lm| <= T)`` with ``P(max(|lp|, |lm|) <= T)``."""
    ok = _converged(summaries)
    if not ok:
        raise ValueError("no converged summaries")
    t = ramanujan_bound(d)
    lp = np.array([s.lambda_plus for s in ok])
    lm = np.array([s.lambda_minus for s in ok])
    lam = np.array([s.lambda_abs for s in ok])
    p_plus = float(np.mean(lp <= t))
    p_minus = float(np.mean(np.abs(lm) <= t))
    return IndependenceReport(
        p_plus=p_plus,
        p_minus=p_minus,
        p_product=p_plus * p_minus,
        p_joint=float(np.mean(lam <= t)),
        n=len(ok),
    )
