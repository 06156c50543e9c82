"""Exception hierarchy shared by the solvers, the simulator and the CLI."""


class HostsortError(Exception):
    pass


class DomainError(HostsortError, ValueError):
    """An argument lies outside the domain of the function (negative price, ...)."""


class ConfigError(HostsortError, ValueError):
    """A parameter violates a typed constraint. ``field`` names the offender."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class UnsupportedConfigurationError(HostsortError, ValueError):
    """The requested computation is undefined for this curve family/parameters."""


class NumericError(HostsortError, ArithmeticError):
    """Non-finite evaluation or a solver that could not be bracketed."""


class BracketError(NumericError):
    """No sign change on the supplied bracket."""
