"""Exception hierarchy shared by the library and the command line driver."""


class CalderonError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class InvalidFamilyError(CalderonError, ValueError):
    """A metric family has a non-positive spatial metric or bad parameters."""

    exit_code = 2


class ConfigError(CalderonError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(CalderonError, ValueError):
    """The slab half-width exceeds the admissible Wick-rotation bound."""

    exit_code = 3

    def __init__(self, message, max_admissible_T=None):
        self.max_admissible_T = max_admissible_T
        super().__init__(message)


class RealizationError(CalderonError, ArithmeticError):
    """Factorization of the Dirichlet realization broke down."""

    exit_code = 4


class OracleDomainError(CalderonError, ValueError):
    exit_code = 2


class DegenerateStateError(CalderonError, ArithmeticError):
    """The symmetrized covariance is not positive definite."""

    exit_code = 4


class StabilityError(CalderonError, ValueError):
    """Requested time step violates the explicit-integrator CFL bound."""

    exit_code = 4


class UnsupportedProbeError(CalderonError, ValueError):
    exit_code = 2
