"""Exception hierarchy shared by every module in the package."""


class RatmaxError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RatmaxError, ArithmeticError):
    """Evaluation outside the feasible region (pole or nonpositive denominator)."""


class ConfigError(RatmaxError, ValueError):
    """Invalid solver, grid, or command configuration."""


class SolverError(RatmaxError, RuntimeError):
    """An optimisation subroutine failed or never produced a feasible point."""


class StateError(RatmaxError, RuntimeError):
    """An internal iterate violated an invariant that should hold by construction."""


class DataError(RatmaxError, ValueError):
    """Malformed, inconsistent, or otherwise unusable data."""


class ParseError(DataError):
    """Text input could not be parsed; carries a 1-based row/column location."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {col}" if col is not None else "") + ")"
        super().__init__(message + loc)
        self.row = row
        self.col = col


class SchemaError(DataError):
    """A persisted model or report does not match the expected JSON schema."""
