"""Extremal non-trivial adjacency eigenvalues of regular multigraphs.

Two routes compute the same quantities. ``dense_spectrum`` diagonalizes the
full adjacency matrix and serves as the oracle for small graphs.
``extremal_nontrivial`` runs a Lanczos solver (ARPACK) on a matrix-free
adjacency operator with the trivial eigenvectors shifted out of the way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh
from sklearn.base import BaseEstimator, TransformerMixin

from .ensembles import bipartition, is_connected
from .exceptions import SizeLimitError

DENSE_LIMIT = 4000
CHEEGER_LIMIT = 20
SUMMARY_COLUMNS = ("lambda_plus", "lambda_minus", "lambda_abs", "is_ramanujan", "converged")


def ramanujan_bound(d):
    return 2.0 * math.sqrt(d - 1)


@dataclass(frozen=True)
class SpectralSummary:
    lambda_plus: float
    lambda_minus: float
    lambda_abs: float
    is_ramanujan: bool
    converged: bool = True

    @classmethod
    def from_extremes(cls, lambda_plus, lambda_minus, degree):
        lam = max(abs(lambda_plus), abs(lambda_minus))
        return cls(
            float(lambda_plus),
            float(lambda_minus),
            float(lam),
            bool(lam <= ramanujan_bound(degree)),
            True,
        )

    @classmethod
    def failed(cls):
        nan = float("nan")
        return cls(nan, nan, nan, False, False)

    def as_row(self):
        return [self.lambda_plus, self.lambda_minus, self.lambda_abs,
                self.is_ramanujan, self.converged]


@dataclass(frozen=True)
class CheegerReport:
    h: float
    lower_bound: float
    upper_bound: float
    witness_set: tuple

    @property
    def holds(self):
        return self.lower_bound <= self.h <= self.upper_bound


def adjacency_operator(g):
    """Matrix-free ``x -> A x`` from the edge multiset.

    ``np.bincount`` scatters both endpoints of every edge in one pass; a
    self-loop ``(v, v)`` therefore adds ``2 x_v`` as required by ``a_vv = 2``.
    """
    n = g.n_vertices
    u = g.edges[:, 0]
    v = g.edges[:, 1]

    def matvec(x):
        x = np.asarray(x, dtype=float).ravel()
        return np.bincount(u, x[v], n) + np.bincount(v, x[u], n)

    return matvec


def dense_adjacency(g):
    n = g.n_vertices
    a = np.zeros((n, n))
    np.add.at(a, (g.edges[:, 0], g.edges[:, 1]), 1.0)
    np.add.at(a, (g.edges[:, 1], g.edges[:, 0]), 1.0)
    return a


def dense_spectrum(g):
    """All eigenvalues of ``A(G)`` in descending order."""
    if g.n_vertices > DENSE_LIMIT:
        raise SizeLimitError(f"dense spectrum limited to N <= {DENSE_LIMIT}")
    return np.linalg.eigvalsh(dense_adjacency(g))[::-1]


def nontrivial_from_spectrum(eigs, degree, atol=1e-8):
    """``(lambda_plus, lambda_minus)`` read off a full descending spectrum.

    Drops the top eigenvalue ``d`` and, when the bottom one equals ``-d``
    within ``atol``, that one too.
    """
    eigs = np.sort(np.asarray(eigs, dtype=float))[::-1]
    rest = eigs[1:]
    if len(rest) and abs(rest[-1] + degree) <= atol:
        rest = rest[:-1]
    if not len(rest):
        raise ValueError("graph has no non-trivial eigenvalues")
    return float(rest[0]), float(rest[-1])


class _BudgetExceeded(Exception):
    pass


def _counted(op, budget):
    count = [0]

    def matvec(x):
        count[0] += 1
        if count[0] > budget:
            raise _BudgetExceeded
        return op(x)

    return matvec


def _extreme(op, n, which, v0, tol, budget, ncv):
    lin = LinearOperator((n, n), matvec=_counted(op, budget), dtype=float)
    vals = eigsh(
        lin, k=1, which=which, v0=v0, tol=tol, ncv=ncv,
        maxiter=budget, return_eigenvectors=False,
    )
    return float(vals[0])


def extremal_nontrivial(g, tol=1e-10, budget_factor=300, ncv=20):
    """Largest and most negative non-trivial eigenvalues of ``g``.

    The all-ones direction (and the signed bipartition when ``g`` is
    bipartite) is deflated by a rank-one shift: ``+/- 2d`` moves each
    trivial eigenvalue past the end of the spectrum being searched.
    Each end may spend at most ``budget_factor * log N`` matvecs; when
    that runs out the summary comes back with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_connected(g):
        raise ValueError("extremal_nontrivial requires a connected graph")
    n, d = g.n_vertices, g.degree
    sides = bipartition(g)
    if n - 1 - (sides is not None) < 1:
        raise ValueError("graph has no non-trivial eigenvalues")
    if n < 4:
        lp, lm = nontrivial_from_spectrum(dense_spectrum(g), d)
        return SpectralSummary.from_extremes(lp, lm, d)

    apply_a = adjacency_operator(g)
    ones = np.full(n, 1.0 / math.sqrt(n))
    trivial = [ones] if sides is None else [ones, sides / math.sqrt(n)]
    shift = 2.0 * d

    def upper(x):
        return apply_a(x) - shift * ones * (ones @ x)

    def lower(x):
        y = apply_a(x)
        for w in trivial:
            y += shift * w * (w @ x)
        return y

    v0 = np.random.default_rng(0x5EED).standard_normal(n)
    for w in trivial:
        v0 -= w * (w @ v0)
    budget = max(int(math.ceil(budget_factor * math.log(n))), 2 * ncv)
    ncv = min(n, ncv)
    try:
        lp = _extreme(upper, n, "LA", v0, tol, budget, ncv)
        lm = _extreme(lower, n, "SA", v0, tol, budget, ncv)
    except (_BudgetExceeded, ArpackNoConvergence, ArpackError):
        return SpectralSummary.failed()
    return SpectralSummary.from_extremes(lp, lm, d)


def ramanujan_check(summary, degree):
    if not summary.converged:
        raise ValueError("cannot classify an unconverged summary")
    return summary.lambda_abs <= ramanujan_bound(degree)


def cheeger_bruteforce(g):
    """Exact expanding constant by enumerating every vertex subset.

    Only subsets with ``|U| <= N/2`` are scanned; the ratio is symmetric
    under complement. Bounds come from ``d - lambda_2``.
    """
    n, d = g.n_vertices, g.degree
    if n > CHEEGER_LIMIT:
        raise SizeLimitError(f"brute-force Cheeger constant limited to N <= {CHEEGER_LIMIT}")
    masks = np.arange(1, 1 << n, dtype=np.int64)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for k in range(n):
        sizes += (masks >> k) & 1
    keep = sizes <= n // 2
    masks, sizes = masks[keep], sizes[keep]
    boundary = np.zeros(len(masks), dtype=np.int64)
    for u, v in g.edges.tolist():
        if u != v:
            boundary += ((masks >> u) ^ (masks >> v)) & 1
    ratio = boundary / np.minimum(sizes, n - sizes)
    best = int(np.argmin(ratio))
    witness = tuple(k for k in range(n) if (int(masks[best]) >> k) & 1)
    lam2 = dense_spectrum(g)[1]
    gap = max(d - lam2, 0.0)
    return CheegerReport(
        h=float(ratio[best]),
        lower_bound=gap / 2.0,
        upper_bound=2.0 * math.sqrt(2.0 * d * gap),
        witness_set=witness,
    )


class SpectralTransformer(TransformerMixin, BaseEstimator):
    """Map a sequence of graphs to rows of extremal-eigenvalue features.

    Output columns follow ``SUMMARY_COLUMNS``; booleans are stored as 0/1
    and unconverged graphs have NaN eigenvalues.
    """

    def __init__(self, tol=1e-10, budget_factor=300):
        self.tol = tol
        self.budget_factor = budget_factor

    def fit(self, X, y=None):
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        rows = [
            extremal_nontrivial(g, tol=self.tol, budget_factor=self.budget_factor).as_row()
            for g in X
        ]
        return np.asarray(rows, dtype=float).reshape(-1, len(SUMMARY_COLUMNS))

    def get_feature_names_out(self, input_features=None):
        return np.asarray(SUMMARY_COLUMNS, dtype=object)
