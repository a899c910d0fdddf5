"""Exception hierarchy shared by the library, the CLI and the HTTP surface.

Each branch carries the process exit code the CLI reports for it.
"""

from collections.abc import Sequence


class EconometricsError(Exception):
    """Base class for every error raised on purpose by this package."""

    exit_code = 1


# ============== Configuration ==============


class ConfigError(EconometricsError):
    """Invalid or inconsistent analysis configuration."""

    exit_code = 2

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


# ============== Data ==============


class DataError(EconometricsError):
    exit_code = 3


class IoFailure(DataError):
    """A file could not be read or written."""


class SchemaError(DataError):
    """A CSV cell or header violates the expected layout."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class GapInYears(DataError):
    def __init__(self, year: int):
        self.year = year
        super().__init__(f"missing observation for year {year}")


class NonPositiveValue(DataError):
    def __init__(self, index: int, value: float, name: str = ""):
        self.index = index
        self.value = value
        super().__init__(f"series {name!r} has non-positive value {value!r} at index {index}")


class SeriesTooShort(DataError):
    def __init__(self, needed: int, available: int, what: str = "operation"):
        self.needed = needed
        self.available = available
        super().__init__(f"{what} needs at least {needed} observations, got {available}")


class SampleTooSmall(SeriesTooShort):
    """The effective regression sample cannot support the parameters."""


class BreakOutOfRange(DataError):
    def __init__(self, message: str, year: int | None = None):
        self.year = year
        super().__init__(message)


# ============== Numerical ==============


class NumericalError(EconometricsError):
    exit_code = 4


class RankDeficient(NumericalError):
    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        super().__init__(f"design matrix is rank deficient; collinear columns: {', '.join(self.columns)}")


class DimensionMismatch(NumericalError):
    pass


class InvalidModelCombination(NumericalError):
    pass


class TrimTooLarge(NumericalError):
    def __init__(self, trim: float, nobs: int):
        self.trim = trim
        self.nobs = nobs
        super().__init__(f"trimming {trim} leaves no admissible break dates for T={nobs}")


class InfeasibleSpec(NumericalError):
    pass


class NotTabulated(NumericalError):
    """No bundled or cached critical value covers the request."""


class MissingCriticalValues(NumericalError):
    pass


class SchemaMismatch(NumericalError):
    """A cached record failed its version or integrity check."""
