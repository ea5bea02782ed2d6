"""Exception types shared across the package."""


class SpinScaleError(Exception):
    """Base class for all package errors."""


class DomainError(SpinScaleError, ValueError):
    """Input outside the mathematical domain of an operation."""


class NonIntegerSpinError(SpinScaleError, ValueError):
    """Half-integer or otherwise non-integer total spin."""


class DimensionMismatch(SpinScaleError, ValueError):
    """Vector/matrix dimensions do not agree."""


class NotNormalized(SpinScaleError, ValueError):
    """Probability vector does not sum to one."""


class UnsupportedModel(SpinScaleError, ValueError):
    """Operation not defined for the requested model."""


class ConvergenceFailure(SpinScaleError, RuntimeError):
    """An eigensolver failed to converge."""


class NonUnitaryInput(SpinScaleError, ValueError):
    """Matrix handed to the unitary eigensolver is not unitary."""


class NoConvergence(SpinScaleError, RuntimeError):
    """Iterative root search did not converge from a given seed."""


class DegenerateStep(SpinScaleError, ValueError):
    """Two consecutive dimensions coincide; slope undefined."""


class WindowTooLarge(SpinScaleError, ValueError):
    """Averaging window exceeds the data length."""


class TooFewPoints(SpinScaleError, ValueError):
    """Not enough points inside the fit window."""


class TooFewLevels(SpinScaleError, ValueError):
    """Not enough spectral levels for spacing statistics."""


class AllDegenerate(SpinScaleError, ValueError):
    """Every spacing ratio was excluded as degenerate."""


class CacheCorruption(SpinScaleError, RuntimeError):
    """Cache entry failed its content-hash check."""


class OutOfBudget(SpinScaleError, RuntimeError):
    """Projected cost of the run exceeds the configured ceiling."""
