"""Exception hierarchy shared by every module of the package."""


class NcMotiveError(Exception):
    """Base class for all package errors."""


class PoleError(NcMotiveError, ValueError):
    """Argument sits on a pole of the function being evaluated."""


class ConvergenceError(NcMotiveError, ArithmeticError):
    """A numerical procedure could not meet its error budget."""


class DivergenceError(NcMotiveError, ValueError):
    """A series or trace diverges for the requested parameters (e.g. beta <= 1)."""


class SingularityError(NcMotiveError, ValueError):
    """Closed form is singular at the requested point."""


class NotATrace(NcMotiveError, ValueError):
    pass


class DimensionMismatch(NcMotiveError, ValueError):
    pass


class ShapeMismatch(NcMotiveError, ValueError):
    pass


class NotIdempotent(NcMotiveError, ValueError):
    pass


class LevelMismatch(NcMotiveError, ValueError):
    pass


class NotAUnit(NcMotiveError, ValueError):
    pass


class ClosureError(NcMotiveError, ValueError):
    pass


class DivisibilityError(NcMotiveError, ValueError):
    pass


class NotCovariant(NcMotiveError, ValueError):
    pass


class ConditionsViolated(NcMotiveError, ValueError):
    pass


class InsufficientZeros(NcMotiveError, ValueError):
    pass


class CheckFailed(NcMotiveError):
    """Raised by the CLI layer when a numerical check misses its tolerance."""
