"""Exception types raised across the package."""

import numpy as np


class NotPositiveDefinite(np.linalg.LinAlgError):
    """A Cholesky pivot fell at or below the positivity threshold."""


class NoConvergence(np.linalg.LinAlgError):
    """The Jacobi eigensolver exhausted its sweep budget."""


class EvalAtEigenvalue(ValueError):
    """A log or gradient of |Phi| was requested where Phi vanishes."""


class DegenerateEigenvalue(ValueError):
    """The smallest eigenvalue is (numerically) repeated, so it has no gradient."""


class GridTooLarge(ValueError):
    pass


class OverflowRisk(OverflowError):
    pass
