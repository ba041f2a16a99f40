"""Tracy-Widom distributions for beta = 1, 2, 4 from Painleve II.

The Hastings-McLeod function ``q`` solves ``q'' = s q + 2 q^3`` with
``q(s) ~ Ai(s)`` as ``s -> +inf`` and ``q(s) ~ sqrt(-s/2)`` as
``s -> -inf``. With

    I1(s) = int_s^inf q,    J(s) = int_s^inf q^2,    I2(s) = int_s^inf (x - s) q^2

the distribution functions are

    F2(s) = exp(-I2)
    F1(s) = exp(-(I2 + I1) / 2)
    F4(s / sqrt 2) = exp(-I2 / 2) cosh(I1 / 2)

The beta = 4 argument scaling is the original Tracy-Widom convention; it is
the one whose mean, standard deviation and mass left of the mean are
-2.3069, 0.71953 and 0.511072.

``q`` is the separatrix of a saddle, so marching from either end amplifies
rounding and truncation error by up to ``exp((2 sqrt 2 / 3) |s|^{3/2})``.
``solve_painleve_ii`` therefore solves the two-point boundary value problem
with a fourth-order Numerov discretisation and Newton's method. The marching
scheme ``integrate_painleve_ivp`` is kept as an independent check on the
right half of the grid, where it is accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats as _sps
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.linalg import solve_banded

from ._validation import as_generator, check_probability
from .exceptions import GridCoverageError, IntegrationError

BETAS = (1, 2, 4)
DEFAULT_S_HI = 10.0
DEFAULT_S_LO = -13.0
DEFAULT_STEP = 0.005
TAIL_MASS = 1e-9


def airy_asymptotic(s, max_terms=60):
    """``(Ai(s), Ai'(s))`` from the large-argument asymptotic series.

    Terms are summed until they stop shrinking or fall below double
    precision, which at ``s >= 6`` gives full accuracy.
    """
    s = float(s)
    if s <= 0:
        raise ValueError("asymptotic Airy series needs s > 0")
    zeta = 2.0 / 3.0 * s**1.5
    u = 1.0
    sum_u = sum_v = 1.0
    last = math.inf
    for k in range(1, max_terms + 1):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        term = u / zeta**k
        if term >= last or term < 1e-18:
            break
        last = term
        sign = -1.0 if k % 2 else 1.0
        sum_u += sign * term
        sum_v += sign * v / zeta**k
    pre = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    return pre * s**-0.25 * sum_u, -pre * s**0.25 * sum_v


def hastings_mcleod_left(s):
    """Left-tail asymptotic series of the Hastings-McLeod function."""
    s = float(s)
    if s >= 0:
        raise ValueError("left asymptotic series needs s < 0")
    x = s**-3
    series = 1 + x / 8 - 73 / 128 * x**2 + 10657 / 1024 * x**3 - 13912277 / 32768 * x**4
    return math.sqrt(-s / 2) * series


def _airy_tail_integrals(s):
    ai, aip = airy_asymptotic(s)
    zeta = 2.0 / 3.0 * s**1.5
    # int_s^inf Ai: leading asymptotic terms, ~1e-12 at s = 8
    i1 = math.exp(-zeta) / (2 * math.sqrt(math.pi) * s**0.75) * (1 - 41 / (48 * zeta))
    j = aip * aip - s * ai * ai
    i2 = (2 * s * s * ai * ai - 2 * s * aip * aip - ai * aip) / 3.0
    return i1, j, i2


@dataclass(frozen=True)
class PainleveSolution:
    """Hastings-McLeod function and its tail integrals on an ascending grid."""

    s: np.ndarray
    q: np.ndarray
    I1: np.ndarray
    J: np.ndarray
    I2: np.ndarray
    step: float
    newton_iterations: int = 0

    @property
    def s_lo(self):
        return float(self.s[0])

    @property
    def s_hi(self):
        return float(self.s[-1])

    def q_at(self, s):
        return CubicSpline(self.s, self.q)(s)


def _newton_numerov(s, q, h, tol, max_iter):
    h2 = h * h / 12.0
    m = len(s) - 2
    for it in range(1, max_iter + 1):
        f = s * q + 2.0 * q**3
        fq = s + 6.0 * q * q
        resid = q[2:] - 2.0 * q[1:-1] + q[:-2] - h2 * (f[2:] + 10.0 * f[1:-1] + f[:-2])
        band = np.empty((3, m))
        band[0, 0] = band[2, -1] = 0.0
        band[0, 1:] = 1.0 - h2 * fq[2:-1]
        band[1] = -2.0 - 10.0 * h2 * fq[1:-1]
        band[2, :-1] = 1.0 - h2 * fq[1:-2]
        dq = solve_banded((1, 1), band, -resid)
        q[1:-1] += dq
        if not np.all(np.isfinite(q)) or np.max(np.abs(q)) > 10.0:
            raise IntegrationError("Newton iterate left the bounded branch (|q| > 10)")
        if np.max(np.abs(dq)) <= tol:
            return it
    raise IntegrationError(f"Newton iteration did not converge in {max_iter} steps")


def solve_painleve_ii(s_hi=DEFAULT_S_HI, s_lo=DEFAULT_S_LO, step=DEFAULT_STEP,
                      tol=1e-12, max_iter=60):
    """Hastings-McLeod solution on ``[s_lo, s_hi]`` with uniform spacing ``step``.

    Boundary values come from the Airy series at ``s_hi`` and the left
    asymptotic series at ``s_lo``; the interior is fixed by Numerov's
    scheme. ``I1``, ``J`` and ``I2`` are accumulated from the right by
    composite Simpson quadrature, seeded with the exact Airy tail integrals
    beyond ``s_hi``.
    """
    if s_hi < 6:
        raise ValueError("s_hi must be >= 6 for the Airy boundary series")
    if s_lo > -8:
        raise ValueError("s_lo must be <= -8")
    if not 0 < step <= 0.005:
        raise ValueError("step must lie in (0, 0.005]")
    n = int(round((s_hi - s_lo) / step))
    if not math.isclose(n * step, s_hi - s_lo, rel_tol=0, abs_tol=1e-9):
        raise ValueError("step must divide s_hi - s_lo")
    s = s_lo + step * np.arange(n + 1)
    s[-1] = s_hi

    # crude positive guess with the right growth at the left end
    q = np.sqrt(np.logaddexp(0.0, -s) / 2.0) * np.exp(-np.maximum(s, 0.0) ** 1.5 / 2.0)
    q[0] = hastings_mcleod_left(s_lo)
    q[-1] = airy_asymptotic(s_hi)[0]
    iters = _newton_numerov(s, q, step, tol, max_iter)

    t1, tj, t2 = _airy_tail_integrals(s_hi)

    def from_right(y, tail):
        return cumulative_simpson(y[::-1], dx=step, initial=0.0)[::-1] + tail

    I1 = from_right(q, t1)
    J = from_right(q * q, tj)
    I2 = from_right(J, t2)
    return PainleveSolution(s, q, I1, J, I2, step, iters)


def integrate_painleve_ivp(s_hi=DEFAULT_S_HI, s_stop=-4.0, step=DEFAULT_STEP):
    """Classical RK4 march of ``q`` from ``s_hi`` down to ``s_stop``.

    Starts from ``q = Ai``, ``q' = Ai'``. Only trustworthy for
    ``s_stop >~ -5``; further left the trajectory peels off the separatrix.
    Returns the descending grid, ``q`` and ``q'``.
    """
    n = int(round((s_hi - s_stop) / step))
    s = s_hi - step * np.arange(n + 1)
    ai, aip = airy_asymptotic(s_hi)
    q = np.empty(n + 1)
    p = np.empty(n + 1)
    q[0], p[0] = ai, aip
    h = -step

    def rhs(t, y0, y1):
        return y1, t * y0 + 2.0 * y0**3

    y0, y1 = ai, aip
    for i in range(n):
        t = s[i]
        k1 = rhs(t, y0, y1)
        k2 = rhs(t + h / 2, y0 + h / 2 * k1[0], y1 + h / 2 * k1[1])
        k3 = rhs(t + h / 2, y0 + h / 2 * k2[0], y1 + h / 2 * k2[1])
        k4 = rhs(t + h, y0 + h * k3[0], y1 + h * k3[1])
        y0 += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y1 += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if not math.isfinite(y0) or abs(y0) > 10.0:
            raise IntegrationError(f"blow-up at s = {s[i + 1]:.4f}")
        q[i + 1], p[i + 1] = y0, y1
    return s, q, p


@lru_cache(maxsize=8)
def default_solution(s_hi=DEFAULT_S_HI, s_lo=DEFAULT_S_LO, step=DEFAULT_STEP):
    return solve_painleve_ii(s_hi, s_lo, step)


class TracyWidom:
    """Tabulated Tracy-Widom distribution for one ``beta``."""

    def __init__(self, beta=1, solution=None):
        if beta not in BETAS:
            raise ValueError(f"beta must be one of {BETAS}, got {beta!r}")
        self.beta = beta
        self.solution = sol = solution if solution is not None else default_solution()
        q, I1, J, I2 = sol.q, sol.I1, sol.J, sol.I2
        if beta == 1:
            x = sol.s
            F = np.exp(-(I2 + I1) / 2.0)
            f = F * (J + q) / 2.0
        elif beta == 2:
            x = sol.s
            F = np.exp(-I2)
            f = F * J
        else:
            x = sol.s / math.sqrt(2.0)
            e = np.exp(-I2 / 2.0)
            ch, sh = np.cosh(I1 / 2.0), np.sinh(I1 / 2.0)
            F = e * ch
            f = math.sqrt(2.0) * e * (J * ch - q * sh) / 2.0
        self.x = x
        self.cdf_table = F
        self.pdf_table = f
        self._cdf = CubicHermiteSpline(x, F, f)
        self._pdf = CubicSpline(x, f)
        self._moments = None

    @property
    def support(self):
        return float(self.x[0]), float(self.x[-1])

    def cdf(self, s, return_flag=False):
        """CDF, clamped to 0 / 1 outside the grid.

        With ``return_flag=True`` also returns a mask of clamped points.
        """
        s = np.asarray(s, dtype=float)
        lo, hi = self.support
        val = np.clip(self._cdf(np.clip(s, lo, hi)), 0.0, 1.0)
        val = np.where(s < lo, 0.0, np.where(s > hi, 1.0, val))
        out = val[()] if val.ndim == 0 else val
        if return_flag:
            return out, (s < lo) | (s > hi)
        return out

    def pdf(self, s):
        s = np.asarray(s, dtype=float)
        lo, hi = self.support
        val = np.where((s < lo) | (s > hi), 0.0, np.maximum(self._pdf(np.clip(s, lo, hi)), 0.0))
        return val[()] if val.ndim == 0 else val

    def ppf(self, p, xtol=1e-12):
        """Inverse CDF by vectorised bisection."""
        p = check_probability(p)
        lo = np.full(p.shape, self.x[0])
        hi = np.full(p.shape, self.x[-1])
        while np.max(hi - lo) > xtol:
            mid = 0.5 * (lo + hi)
            below = self._cdf(mid) < p
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = 0.5 * (lo + hi)
        return out[()] if out.ndim == 0 else out

    def rvs(self, size=None, rng=None):
        u = as_generator(rng).random(size)
        return self.ppf(np.clip(u, 1e-300, None))

    def _check_coverage(self):
        left = self.cdf_table[0]
        right = 1.0 - self.cdf_table[-1]
        if left > TAIL_MASS or right > TAIL_MASS:
            raise GridCoverageError(
                f"grid misses tail mass (left {left:.2e}, right {right:.2e})"
            )

    def moments(self):
        """``(mean, std)`` by Simpson quadrature of the tabulated density."""
        if self._moments is None:
            self._check_coverage()
            x, f = self.x, self.pdf_table
            mass = simpson(f, x=x)
            mean = simpson(x * f, x=x) / mass
            var = simpson((x - mean) ** 2 * f, x=x) / mass
            self._moments = (float(mean), float(math.sqrt(var)))
        return self._moments

    @property
    def mean(self):
        return self.moments()[0]

    @property
    def std(self):
        return self.moments()[1]

    @property
    def mass_left_of_mean(self):
        return float(self.cdf(self.mean))

    def normalized(self):
        return NormalizedDistribution(self)

    def __repr__(self):
        return f"TracyWidom(beta={self.beta})"


class NormalizedDistribution:
    """Affine rescaling of a distribution to mean 0 and variance 1.

    ``pdf(x) = sigma * g(sigma x + mu)``.
    """

    def __init__(self, dist):
        self.dist = dist
        self.mu, self.sigma = dist.moments()
        self.name = f"tw{dist.beta}" if isinstance(dist, TracyWidom) else repr(dist)

    def pdf(self, x):
        return self.sigma * self.dist.pdf(self.sigma * np.asarray(x, dtype=float) + self.mu)

    def cdf(self, x):
        return self.dist.cdf(self.sigma * np.asarray(x, dtype=float) + self.mu)

    def ppf(self, p):
        return (self.dist.ppf(p) - self.mu) / self.sigma

    def rvs(self, size=None, rng=None):
        return (self.dist.rvs(size, rng) - self.mu) / self.sigma

    def moments(self):
        x = self.dist.x
        z = (x - self.mu) / self.sigma
        f = self.sigma * self.dist.pdf_table
        mean = simpson(z * f, x=z)
        var = simpson((z - mean) ** 2 * f, x=z)
        return float(mean), float(math.sqrt(var))

    @property
    def mass_left_of_mean(self):
        return float(self.cdf(0.0))

    def __repr__(self):
        return f"NormalizedDistribution({self.dist!r})"


class StandardNormal:
    """Standard normal with the same evaluator surface as the TW objects."""

    name = "normal"
    mass_left_of_mean = 0.5

    def pdf(self, x):
        return _sps.norm.pdf(x)

    def cdf(self, x):
        return _sps.norm.cdf(x)

    def ppf(self, p):
        return _sps.norm.ppf(check_probability(p))

    def rvs(self, size=None, rng=None):
        return as_generator(rng).standard_normal(size)

    def moments(self):
        return 0.0, 1.0

    def __repr__(self):
        return "StandardNormal()"


@lru_cache(maxsize=None)
def get_tracy_widom(beta):
    return TracyWidom(beta)


REFERENCE_NAMES = ("tw1", "tw2", "tw4", "normal")


def reference_distribution(name):
    """Mean-0 / variance-1 reference by name: tw1, tw2, tw4 or normal."""
    name = name.lower()
    if name == "normal":
        return StandardNormal()
    if name in ("tw1", "tw2", "tw4"):
        return NormalizedDistribution(get_tracy_widom(int(name[2:])))
    raise ValueError(f"unknown reference {name!r}; expected one of {REFERENCE_NAMES}")


def tw_cdf(beta, s, return_flag=False):
    return get_tracy_widom(beta).cdf(s, return_flag=return_flag)


def tw_pdf(beta, s):
    return get_tracy_widom(beta).pdf(s)


def tw_moments(beta):
    return get_tracy_widom(beta).moments()


def tw_quantile(beta, p):
    return get_tracy_widom(beta).ppf(p)


def normalized(dist):
    return NormalizedDistribution(dist)


def tw_table(step=0.01, s_lo=-8.0, s_hi=6.0):
    """Rows ``(s, f1, F1, f2, F2, f4, F4)`` on a uniform grid."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((s_hi - s_lo) / step + 1e-9))
    s = s_lo + step * np.arange(n + 1)
    cols = [s]
    for beta in BETAS:
        tw = get_tracy_widom(beta)
        cols += [tw.pdf(s), tw.cdf(s)]
    return np.column_stack(cols)
