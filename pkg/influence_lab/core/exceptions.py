"""
Custom exceptions for the application
"""

from typing import Optional


class InfluenceLabException(Exception):
    """Base exception for influence_lab"""

    def __init__(self, message: str = "influence_lab error"):
        self.message = message
        super().__init__(self.message)


class ValidationError(InfluenceLabException):
    """Invalid argument or violated precondition"""

    def __init__(self, message: str = "Validation error"):
        super().__init__(message)


class NotFoundError(InfluenceLabException):
    """Missing file or directory"""

    def __init__(self, message: str = "Resource not found"):
        super().__init__(message)


class DataFormatError(InfluenceLabException):
    """Input file could not be parsed"""

    def __init__(self, message: str = "Data format error", row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        if row is not None and column is not None:
            message = f"{message} (row {row}, column {column})"
        elif row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)


class ConstantResponseError(InfluenceLabException):
    """Response has zero variance"""

    def __init__(self, message: str = "constant response"):
        super().__init__(message)


class ConstantColumnError(InfluenceLabException):
    """Explanatory column has a single distinct value"""

    def __init__(self, message: str = "constant column"):
        super().__init__(message)


class NonDiscreteColumnError(InfluenceLabException):
    """Column has too many distinct values to define a partition"""

    def __init__(self, column: str, levels: int, limit: int):
        self.column = column
        self.levels = levels
        super().__init__(
            f"column {column!r} has {levels} distinct values (limit {limit}); "
            f"run `discretize` on it first"
        )


class DimensionMismatchError(InfluenceLabException):
    """Array shapes do not agree"""

    def __init__(self, message: str = "Dimension mismatch"):
        super().__init__(message)


class TrainingDivergedError(InfluenceLabException):
    """Loss became non-finite during gradient descent"""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training diverged at epoch {epoch} (non-finite loss)")


# Exit codes for the command line
EXIT_OK = 0
EXIT_COMPUTATION_ERROR = 1
EXIT_USAGE_ERROR = 2

_USAGE_ERRORS = (
    ValidationError,
    NotFoundError,
    DataFormatError,
    NonDiscreteColumnError,
    DimensionMismatchError,
)


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the command-line exit code"""
    if isinstance(exc, _USAGE_ERRORS):
        return EXIT_USAGE_ERROR
    return EXIT_COMPUTATION_ERROR
