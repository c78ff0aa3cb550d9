"""Exception types shared across the package."""


class DeflactError(Exception):
    """Base class for package errors."""


class DimensionMismatchError(DeflactError, ValueError):
    """An operand has the wrong length/shape for the operator or tuple."""

    def __init__(self, what, expected, got):
        super().__init__(f"{what}: expected length {expected}, got {got}")
        self.expected = expected
        self.got = got


class ConfigError(DeflactError, ValueError):
    """A solver or CLI parameter violates its admissible range."""


class RankDeficiencyError(DeflactError, ValueError):
    """Gram-Schmidt hit a (numerically) dependent column."""

    def __init__(self, column, norm, threshold, context=""):
        msg = (f"column {column} is numerically dependent "
               f"(norm {norm:.3e} <= threshold {threshold:.3e})")
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)
        self.column = column


class DivergenceError(DeflactError, RuntimeError):
    """A nonlinear iteration produced non-finite values.

    Carries the last finite iterate so callers can salvage it.
    """

    def __init__(self, iteration, last_iterate):
        super().__init__(f"non-finite values at iteration {iteration}")
        self.iteration = iteration
        self.last_iterate = last_iterate
