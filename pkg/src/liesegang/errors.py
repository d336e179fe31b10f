"""Exception types shared across the package."""

__all__ = [
    "LiesegangError",
    "InvalidParameter",
    "NonConvergence",
    "NegativeGamma",
    "NotSupercritical",
    "NoRoot",
    "InvalidGrid",
    "SingularPivot",
    "OutOfRange",
    "ParseError",
    "ValidationError",
]


class LiesegangError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(LiesegangError):
    """A special-function argument lies outside the supported envelope."""


class NonConvergence(LiesegangError):
    """A series hit its term cap before reaching the requested tolerance."""


class NegativeGamma(LiesegangError):
    """Sink strengths must be nonnegative."""


class NotSupercritical(LiesegangError):
    """The matching condition has a root only when u* < u*_0."""


class NoRoot(LiesegangError):
    """The requested bracketing root does not exist for these parameters."""


class InvalidGrid(LiesegangError):
    """Grid sizes violate the discretization constraints."""


class SingularPivot(LiesegangError):
    """A tridiagonal pivot underflowed during elimination."""


class OutOfRange(LiesegangError):
    """A diagnostics abscissa lies outside the recorded coverage."""


class ParseError(LiesegangError):
    """Malformed configuration input (bad line, unknown key, bad literal)."""


class ValidationError(LiesegangError):
    """A parsed configuration violates a run invariant."""
