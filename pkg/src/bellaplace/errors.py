"""Exception hierarchy shared by every layer of the package."""


class BellaplaceError(Exception):
    """Base class for all errors raised by bellaplace."""


class ArgumentDomainError(BellaplaceError, ValueError):
    """An argument lies outside the domain of the operation."""


class OracleLimitError(ArgumentDomainError):
    """The brute-force oracle was asked for a problem larger than its limit."""


class KernelDomainError(ArgumentDomainError):
    """A kernel denominator evaluated to a non-positive value."""


class DivergenceError(BellaplaceError, ArithmeticError):
    """A series or integral failed to converge."""


class NonIntegrableError(DivergenceError):
    """The integrand does not decay fast enough to be integrable on [0, inf)."""


class ToleranceError(BellaplaceError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivisions before meeting tolerance."""


class ContourDivergenceError(DivergenceError):
    """The inversion integrand failed to decay along the vertical contour.

    The diagnostic report gathered before giving up is kept on ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report if report is not None else {}


class ExpressionSyntaxError(BellaplaceError, ValueError):
    """Syntax error in a function expression, with byte offset and expectations."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)


class EvaluationError(ArgumentDomainError):
    """An expression could not be evaluated at the requested point."""

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (expression offset {offset})"
        super().__init__(message)
