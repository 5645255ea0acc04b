"""Exception hierarchy shared across the package."""


class SevregError(Exception):
    """Base class for all package errors."""


class ParameterError(SevregError, ValueError):
    """A distribution or model parameter violates its constraint."""


class ModeUndefinedError(ParameterError):
    """The requested closed-form mode does not exist for these parameters."""


class DomainError(SevregError, ValueError):
    """An argument lies outside the domain of the operation (support, (0,1), ...)."""


class NumericError(SevregError, ArithmeticError):
    """A computation produced a non-finite or boundary value.

    ``row`` carries the index of the first offending observation when the
    failure happened inside a per-observation computation.
    """

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row


class DataError(SevregError, ValueError):
    """Malformed input data or configuration.

    ``row`` / ``column`` identify the offending cell when known.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class StdErrorsUnavailable(SevregError):
    """Standard errors were withheld (singular Hessian), so tests cannot run."""
