"""Exception hierarchy shared by every module."""


class CompanionQuadError(Exception):
    """Base class for all errors raised by this package."""


class ExpressionSyntaxError(CompanionQuadError, ValueError):
    """Malformed expression text. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExpressionSyntaxError):
    pass


class EvaluationDomainError(CompanionQuadError, ArithmeticError):
    """An expression was evaluated outside its domain (log, sqrt, division)."""

    def __init__(self, message: str, subexpression: str):
        self.subexpression = subexpression
        super().__init__(f"{message} in '{subexpression}'")


class IntervalError(CompanionQuadError, ValueError):
    """Invalid interval context or partition."""


class IntegrationError(CompanionQuadError, RuntimeError):
    """Adaptive integration failed to converge."""


class BoundInputError(CompanionQuadError, ValueError):
    """Inputs to a bound are mutually inconsistent (e.g. gamma > S)."""


class DensityError(CompanionQuadError, ValueError):
    """A supplied density is negative or cannot be normalised."""
