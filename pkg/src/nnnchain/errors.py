"""Exceptions raised when a closed-form route is numerically unusable.

Most of these are recoverable: the caller is expected to fall back to the
recurrence evaluator, refine a grid, or pick a different eigenvalue.
"""


class ChainError(Exception):
    """Base class for all package errors."""


class NearSingularCoefficient(ChainError, ArithmeticError):
    """A denominator of the explicit general-solution coefficients vanishes."""


class BZero(ChainError, ArithmeticError):
    """The next-nearest-neighbour coupling is too small for the gamma variable."""


class DegenerateAngle(ChainError, ArithmeticError):
    """sin(2*alpha) is too small (or undefined) for the Chebyshev closed form."""


class PoleProximity(ChainError, ArithmeticError):
    """A tangent argument sits on (or next to) one of its poles."""


class InadmissibleAlpha(ChainError, ValueError):
    """alpha is not of the form x, i*x or pi/2 + i*x, or x came out non-real."""


class AmbiguousBranchMatch(ChainError):
    """Two candidates are equally close when continuing a root curve."""


class GridTooCoarse(ChainError):
    """A crossing between two root curves could not be localized."""


class DegenerateModes(ChainError, ArithmeticError):
    """The four exponential modes of the eigenvector ansatz are not independent."""


class ConvergenceError(ChainError, RuntimeError):
    """An iterative solver did not reach its tolerance."""
