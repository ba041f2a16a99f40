"""Exception types raised by the library.

Plain argument errors are ``ValueError``; the classes here mark failures a
caller may want to catch and handle separately.
"""


class SamplingExhaustedError(RuntimeError):
    """Rejection sampling hit its cap without meeting the constraint."""


class IntegrationError(ArithmeticError):
    """The Painleve II solve diverged or failed to converge."""


class GridCoverageError(ValueError):
    """A tabulated distribution does not cover enough of its tails."""


class DegenerateSampleError(ValueError):
    """A sample has zero variance where a scale is required."""


class FitDomainError(ValueError):
    """Power-law fit requested outside the model's domain."""


class SizeLimitError(ValueError):
    """Input too large for an exhaustive routine."""
