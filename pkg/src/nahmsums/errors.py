"""Exception types raised across the package."""


class NahmError(Exception):
    """Base class for all errors raised by nahmsums."""


class DomainError(NahmError, ValueError):
    """An argument lies outside the domain of a function (poles, cuts)."""


class PrecisionError(NahmError):
    """The requested working precision cannot be honoured."""


class NotPositiveDefinite(NahmError, ValueError):
    pass


class NoConvergence(NahmError, ArithmeticError):
    """An iterative solver did not reach its tolerance within the iteration cap."""


class UnsupportedFamily(NahmError, ValueError):
    pass


class DivergentProduct(NahmError, ValueError):
    pass


class DivisionByZeroSeries(NahmError, ZeroDivisionError):
    """Division by a series whose known part is identically zero."""


class ParseError(NahmError, ValueError):
    pass
