"""Exception and warning types shared across the package."""


class DimensionMismatch(ValueError):
    """Operand shapes are incompatible for the requested operation."""


class IndexOutOfRange(IndexError):
    """An index list references a row/column outside the matrix."""


class NotPositiveDefinite(ArithmeticError):
    """Factorization hit a non-positive pivot; the matrix is not SPD.

    ``index`` is the zero-based elimination step at which the pivot failed.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"non-positive pivot at elimination step {index}")


class ZeroPivot(ArithmeticError):
    """LDL^T elimination hit a pivot too close to zero to divide by."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"near-zero pivot at elimination step {index}")


class InvalidOverlap(ValueError):
    """Overlap fraction outside [0, 0.5)."""


class TooManyBlocks(ValueError):
    """Requested partition cannot fit: blocks too small or overlap too deep."""


class NotPerfectSquare(ValueError):
    """2D grids require a perfect-square point count."""


class InvalidHyperparameter(ValueError):
    """A kernel hyper-parameter is missing or non-positive."""


class UncoveredIndices(ValueError):
    """Partition validation found indices not covered by any set."""

    def __init__(self, indices, message: str | None = None):
        self.indices = list(indices)
        super().__init__(message or f"indices not covered by any set: {self.indices}")


class DuplicateWithinSet(ValueError):
    """An index set contains a repeated entry."""


class OutOfMemoryBudget(RuntimeError):
    """An experiment would exceed the configured memory budget."""


class IoError(OSError):
    """Matrix file could not be read or written, or has a malformed layout."""


class NoConvergenceWarning(RuntimeWarning):
    """An iterative estimator hit its iteration cap before stabilizing.

    The estimate is still returned; callers that care can promote this
    warning to an error via the ``warnings`` module.
    """
