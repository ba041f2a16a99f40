"""Small input-validation helpers shared across modules."""

import numbers

import numpy as np
from sklearn.utils import check_array


def check_int(value, name, *, minimum=None, even=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    if even and value % 2:
        raise ValueError(f"{name} must be even, got {value}")
    return value


def check_probability(p, name="p"):
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError(f"{name} must lie strictly inside (0, 1)")
    return p


def check_sample(values, name="values", *, min_size=1):
    """Return ``values`` as a finite 1-D float array."""
    arr = check_array(
        np.asarray(values, dtype=float).reshape(-1, 1),
        ensure_min_samples=min_size,
        input_name=name,
    )
    return arr.ravel()


def as_generator(rng):
    """Accept a Generator, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
