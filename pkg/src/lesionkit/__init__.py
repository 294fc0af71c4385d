"""Dermoscopy lesion analysis toolkit.

Segmentation via fast discrete active contours, ABCD-rule feature
extraction, a trainable linear classifier with confidence presentation,
randomized-occlusion saliency maps, threshold-sweep evaluation, and a
REST decision-support service with CLI front end.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DegenerateSegmentationError,
    DuplicateProviderError,
    EvaluationError,
    ExplanationAbortedError,
    InvalidInputError,
    InvalidParameterError,
    LesionKitError,
    NoLesionError,
    ProviderError,
    ProviderUnavailableError,
    TrainingError,
    UnknownProviderError,
)
from .imaging import BinaryMask, FloatPlane, RasterImage  # noqa: F401
from .segmentation import KERNEL_BACKEND  # noqa: F401
