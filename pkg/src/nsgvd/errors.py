"""Exception hierarchy shared across the engine.

The CLI maps these onto exit codes: ConfigError -> 1, DataError (and
subclasses) -> 2, VerificationError -> 3.
"""


class NsgvdError(Exception):
    """Base class for engine errors."""


class ConfigError(NsgvdError):
    """Invalid configuration or arguments."""


class DataError(NsgvdError):
    """Malformed or inconsistent input data."""


class TensorFormatError(DataError):
    """Tensor file violates the on-disk layout."""


class InsufficientFramesError(DataError):
    """Video has fewer frames than the sampling target."""


class ShapeMismatchError(DataError):
    """Operands have incompatible shapes."""


class DegenerateDenominatorError(NsgvdError):
    """A normalized-gradient denominator is exactly zero or below the floor."""


class FeatureExtractionError(NsgvdError):
    """No usable frames survived feature extraction."""


class InsufficientDataError(NsgvdError):
    """Too few samples for the requested operation."""


class TrainingDivergedError(NsgvdError):
    """Objective became non-finite during kernel training."""

    def __init__(self, iteration: int, message: str = ""):
        self.iteration = iteration
        super().__init__(message or f"non-finite objective at iteration {iteration}")


class AdmissibilityError(NsgvdError):
    """Requested (C, lambda) pair violates the feasibility conditions."""


class VerificationError(NsgvdError):
    """A verification suite reported failures."""
