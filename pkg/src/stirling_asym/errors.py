"""Exception hierarchy shared by the library and the CLI."""


class StirlingAsymError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class DomainError(StirlingAsymError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class ResourceLimitError(StirlingAsymError):
    """A request exceeds the configured memory budget."""

    exit_code = 2


class NonConvergenceError(StirlingAsymError, ArithmeticError):
    """An iterative solver failed to reach its tolerance."""

    exit_code = 3
