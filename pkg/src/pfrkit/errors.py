"""Exception types shared across the package."""

from __future__ import annotations


class PfrkitError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(PfrkitError):
    """Operands live in spaces of incompatible dimension."""


class ContainmentError(PfrkitError):
    """A vector or subspace is not contained where it was required to be."""


class IsotropyError(PfrkitError):
    """A set or subspace fails the required isotropy / Lagrangian condition."""


class BoundednessError(PfrkitError):
    """A function exceeded the 1-bounded contract |f(x)| <= 1."""


class DepthLimitError(PfrkitError):
    """A projection stack exceeded the configured depth cap."""


class DenseCapError(PfrkitError):
    """A dense 2^n table was requested above the configured dimension cap."""


class ParameterError(PfrkitError):
    """A parameter is outside its documented range."""


class InfeasibleParameterError(ParameterError):
    """Exact parameter schedule demands more samples than the configured cap."""


class DecompositionError(PfrkitError):
    """A structure-decomposition routine could not reach its target norms."""
