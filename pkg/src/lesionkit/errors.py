"""Exception hierarchy shared by all lesionkit modules."""


class LesionKitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(LesionKitError):
    """Malformed input data: wrong channel count, mismatched dimensions,
    out-of-range values, undecodable or alpha-carrying images."""


class InvalidParameterError(LesionKitError):
    """A parameter violates its contract (even kernel size, sigma <= 0, ...)."""


class NoLesionError(LesionKitError):
    """An operation that requires a nonempty lesion mask received an empty one."""


class DegenerateSegmentationError(LesionKitError):
    """Segmentation collapsed to an empty or full-frame foreground.

    Carries the offending mask so callers can inspect what happened.
    """

    def __init__(self, message, mask=None):
        super().__init__(message)
        self.mask = mask


class TrainingError(LesionKitError):
    """Training could not proceed; the message carries a diagnosis."""


class ExplanationAbortedError(LesionKitError):
    """The classifier failed during saliency estimation."""

    def __init__(self, message, cause=None):
        super().__init__(message)
        self.cause = cause


class EvaluationError(LesionKitError):
    """Dataset evaluation could not produce any usable scores."""


class ProviderError(LesionKitError):
    """Base class for provider-registry errors."""


class DuplicateProviderError(ProviderError):
    """A provider id was registered twice for the same kind."""


class UnknownProviderError(ProviderError):
    """No provider registered under the requested (kind, id)."""


class ProviderUnavailableError(ProviderError):
    """Provider exists but is configured as unavailable."""


class ConfigError(LesionKitError):
    """Service configuration is invalid or references missing paths."""
