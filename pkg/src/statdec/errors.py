"""Exception hierarchy shared by every statdec module."""


class StatDECError(Exception):
    """Base class for all statdec errors."""


class ShapeError(StatDECError, ValueError):
    """Array dimensions do not agree."""


class TraceMismatchError(ShapeError):
    """A forward trace does not match the network or gradient it is used with."""


class ParameterError(StatDECError, ValueError):
    """An argument is outside its valid range."""


class DegenerateDataError(ParameterError):
    """Input data cannot support the requested operation (e.g. identical points)."""


class DegenerateRowError(StatDECError, ValueError):
    """A row cannot be normalized because its sum is zero or negative."""

    def __init__(self, row: int, message: str | None = None):
        self.row = row
        super().__init__(message or f"row {row} has a non-positive sum")


class DegenerateAssignmentError(DegenerateRowError):
    """A target-distribution row collapsed to zero after flooring."""


class DataFormatError(StatDECError, ValueError):
    """A dataset file is malformed."""

    def __init__(
        self,
        message: str,
        *,
        offset: int | None = None,
        row: int | None = None,
        column: int | None = None,
    ):
        self.offset = offset
        self.row = row
        self.column = column
        location = []
        if offset is not None:
            location.append(f"byte offset {offset}")
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")


class NonFiniteError(StatDECError, ArithmeticError):
    """A computation produced NaN or infinite values."""


class DivergenceError(NonFiniteError):
    """Training produced a non-finite loss."""

    def __init__(self, iteration: int, message: str | None = None):
        self.iteration = iteration
        super().__init__(message or f"non-finite loss at iteration {iteration}")
