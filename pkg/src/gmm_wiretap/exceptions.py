"""Exception and warning types raised by the package."""

import numpy as np


class InvalidDimensionError(ValueError):
    """A dimension or count argument is out of its allowed range."""


class InvalidSpecError(ValueError):
    """A construction spec violates its invariants."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix that must be positive definite is not.

    ``pivot`` holds the offending Cholesky pivot when it is known.
    """

    def __init__(self, message, pivot=None, index=None):
        super().__init__(message)
        self.pivot = pivot
        self.index = index


class RankDeficiencyError(SingularMatrixError):
    """A pushed-forward covariance lost rank (e.g. more receive antennas than signal rank)."""


class SubspaceCollisionWarning(UserWarning):
    """Two mixture classes occupy (numerically) the same range space."""
