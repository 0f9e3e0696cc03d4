"""Exception hierarchy shared by every module of the package."""


class WKBError(Exception):
    """Base class for domain errors (mapped to exit status 1 by the CLI)."""


class ZeroLeadingCoefficient(WKBError):
    pass


class ZeroOperator(WKBError):
    pass


class OrderTooHigh(WKBError):
    pass


class BelowTruncation(WKBError):
    pass


class DimensionMismatch(WKBError):
    pass


class NotInvertible(WKBError):
    pass


class InvalidDensity(WKBError):
    pass


class MalformedTables(WKBError):
    pass


class NotAbelian(WKBError):
    pass


class NotComposable(WKBError):
    pass


class MissingAssignment(WKBError):
    pass


class InvalidCocycle(WKBError):
    pass


class BudgetExceeded(WKBError):
    """Search stopped at the candidate ceiling; ``partial`` holds what was found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class MismatchDetected(WKBError):
    pass


class InvalidGenerator(WKBError):
    pass


class DepthInsufficient(WKBError):
    pass


class NonCentralDefect(WKBError):
    pass


class LiftFailure(WKBError):
    pass


class ParseError(Exception):
    """Malformed input (exit status 2)."""
