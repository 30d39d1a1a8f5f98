"""Exception hierarchy shared by every btstrata module."""

from typing import Any, Mapping, Optional


class BTStrataError(Exception):
    """Base exception for btstrata errors."""

    def __init__(self, message: str, context: Optional[Mapping[str, Any]] = None) -> None:
        """Initialize BTStrataError.

        Args:
            message: Error message
            context: Optional parameters that caused the error
        """
        super().__init__(message)
        self.context = dict(context) if context else {}


class DescriptorMismatchError(BTStrataError):
    """Operands belong to different fields or rings."""


class DivisionByZeroError(BTStrataError):
    """Inversion of zero or of a non-unit."""


class BoundExceededError(BTStrataError):
    """An enumeration would exceed a configured bound."""


class WindowOverflowError(BTStrataError):
    """A lattice would leave the precision window."""


class NotIntegralError(BTStrataError):
    """Lattice is not contained in its dual."""


class NotVertexError(BTStrataError):
    """Lattice is not a vertex lattice."""


class ZeroTypeError(BTStrataError):
    """Symplectic quotient of a type-0 lattice was requested."""


class ZeroDimError(BTStrataError):
    """Orthogonal quotient would be zero dimensional."""


class SpaceMismatchError(BTStrataError):
    """Subspaces live in different form spaces or levels."""


class NotSandwichedError(BTStrataError):
    """Lattice is not between the two lattices of a quotient."""


class BadParametersError(BTStrataError):
    """Parameters outside the supported range."""


class WittIndexTooSmallError(BTStrataError):
    """Requested isotropic dimension exceeds the Witt index."""


class NotRationalError(BTStrataError):
    """Subspace or lattice is not Frobenius-stable."""


class InsufficientDataError(BTStrataError):
    """Not enough point counts to estimate a dimension."""


class PiModularExcludedError(BTStrataError):
    """The π-modular case (n even, 2h = n) is excluded."""


class NotStableError(BTStrataError):
    """τ-iteration did not stabilise inside the window."""
