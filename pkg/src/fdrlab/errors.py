"""Exception types shared across the package."""


class FdrLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FdrLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateDataError(FdrLabError, ValueError):
    """Input data admits no meaningful answer, e.g. zero pooled variance."""


class UndefinedResultError(FdrLabError, ArithmeticError):
    """The requested quantity is undefined for these inputs, e.g. a 0/0 rate."""


class ConfigurationError(FdrLabError, ValueError):
    """Invalid or mutually inconsistent configuration objects."""
