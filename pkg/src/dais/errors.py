"""Exception types raised by the dais package."""

import numpy as np


class DaisError(Exception):
    """Base class for all errors raised by this package."""


class CholeskyFailure(DaisError, np.linalg.LinAlgError):
    """A matrix expected to be positive-definite failed Cholesky factorization."""


class DimensionMismatch(DaisError, ValueError):
    pass


class NonFiniteDensity(DaisError, FloatingPointError):
    """A target evaluation returned NaN or an infinite value.

    ``index`` is the row of the offending sample in its batch.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"non-finite target density or gradient at sample {self.index}")


class HessianUnavailable(DaisError, NotImplementedError):
    pass


class NoConvergence(DaisError, RuntimeError):
    pass


class ConfigError(DaisError, ValueError):
    pass


class ParseError(DaisError, ValueError):
    """Malformed CSV input. ``row`` and ``column`` are 0-based file positions."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        loc = f" at {', '.join(where)}" if where else ""
        super().__init__(f"{message}{loc}")


class RaggedRows(ParseError):
    pass


class LabelError(ParseError):
    pass
