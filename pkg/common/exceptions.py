# common/exceptions.py


class SphereConeError(Exception):
    """Base class for every library failure. `exit_code` is used by the CLI."""

    exit_code = 1


class ConfigurationError(SphereConeError, ValueError):
    exit_code = 2


class DomainError(SphereConeError, ValueError):
    """An argument lies outside the domain of the function."""

    exit_code = 2


class NumericError(SphereConeError, ArithmeticError):
    exit_code = 3


class InfiniteResultError(NumericError):
    """The exact result is +inf and cannot be returned as a finite float."""


class SequenceExhaustedError(NumericError):
    pass


class ConvergenceError(NumericError):
    pass
