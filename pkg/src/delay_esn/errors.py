"""Exception hierarchy shared across the package."""


class DelayEsnError(Exception):
    """Base class for all package errors."""


class DimensionError(DelayEsnError, ValueError):
    pass


class SingularSystemError(DelayEsnError, ArithmeticError):
    pass


class GenerationError(DelayEsnError, RuntimeError):
    pass


class InsufficientDataError(DelayEsnError, ValueError):
    pass


class DegenerateSeriesError(DelayEsnError, ValueError):
    pass


class ZeroReferenceError(DelayEsnError, ValueError):
    pass


class IntegrationError(DelayEsnError, ArithmeticError):
    """Raised when a trajectory leaves the finite reals.

    The failing sample index is kept on ``step``.
    """

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class AggregationError(DelayEsnError, ValueError):
    pass


class AblationError(DelayEsnError, RuntimeError):
    pass


class FormatError(DelayEsnError, ValueError):
    """Malformed input file. ``row`` is 1-based when known."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
