"""Pluggable analysis backends.

Three provider kinds exist: ``classifier`` (image -> Prediction),
``segmenter`` (image -> SegmentationResult), and ``feature-mask``
(image + lesion mask + feature class -> BinaryMask). The registry maps
(kind, id) to an implementation and keeps one default id per kind;
requests that name an id get exactly that id or an error - defaults apply
only when no id is requested. A registry is immutable once built; config
reloads swap the whole registry object atomically.

The built-in feature-mask provider is a transparent placeholder: a
band-pass (difference-of-Gaussians) texture response thresholded inside
the lesion, with a fixed per-class band. It keeps the dermoscopic-feature
endpoints functional and is labeled "heuristic" in every response so
nobody mistakes it for a clinically validated detector.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateProviderError,
    ProviderUnavailableError,
    UnknownProviderError,
)
from .imaging import BinaryMask, FloatPlane, RasterImage, gaussian_filter, rgb_to_yuv

CLASSIFIER = "classifier"
SEGMENTER = "segmenter"
FEATURE_MASK = "feature-mask"
KINDS = (CLASSIFIER, SEGMENTER, FEATURE_MASK)

FEATURE_CLASSES = (
    "globules",
    "streaks",
    "pigment_network",
    "milia_like_cyst",
    "negative_network",
)

# per-class band-pass settings: (sigma_fine, sigma_coarse, polarity, rel_threshold)
# polarity +1 keeps bright-on-dark responses, -1 dark-on-bright
FEATURE_BANDS = {
    "globules": (1.0, 3.0, -1, 0.25),
    "streaks": (1.5, 5.0, -1, 0.40),
    "pigment_network": (0.8, 2.0, -1, 0.45),
    "milia_like_cyst": (1.0, 3.0, +1, 0.40),
    "negative_network": (1.2, 3.5, +1, 0.45),
}


@dataclass(frozen=True)
class ProviderDescriptor:
    kind: str
    id: str
    taxonomy: object = None  # classifiers only
    capabilities: frozenset = field(default_factory=frozenset)
    available: bool = True


class Registry:
    """Immutable (kind, id) -> implementation table with per-kind defaults."""

    def __init__(self):
        self._providers = {}
        self._defaults = {}
        self._sealed = False

    def register(self, descriptor: ProviderDescriptor, implementation, default=False):
        if self._sealed:
            raise DuplicateProviderError("registry is sealed; build a new one to change it")
        key = (descriptor.kind, descriptor.id)
        if key in self._providers:
            raise DuplicateProviderError(f"provider {key} already registered")
        self._providers[key] = (descriptor, implementation)
        if default or descriptor.kind not in self._defaults:
            self._defaults[descriptor.kind] = descriptor.id
        return self

    def seal(self):
        self._sealed = True
        return self

    def resolve(self, kind, provider_id=None):
        """Implementation for (kind, id); the default id applies only when
        no id was requested - a named id is never silently substituted."""
        if provider_id is None:
            provider_id = self._defaults.get(kind)
            if provider_id is None:
                raise UnknownProviderError(f"no default {kind} provider registered")
        key = (kind, provider_id)
        if key not in self._providers:
            raise UnknownProviderError(f"no {kind} provider with id {provider_id!r}")
        descriptor, impl = self._providers[key]
        if not descriptor.available:
            raise ProviderUnavailableError(f"{kind} provider {provider_id!r} is unavailable")
        return descriptor, impl

    def descriptors(self, kind=None):
        return [
            d
            for (k, _), (d, _) in sorted(self._providers.items())
            if kind is None or k == kind
        ]

    def default_id(self, kind):
        return self._defaults.get(kind)


def heuristic_feature_mask(img: RasterImage, lesion_mask: BinaryMask, feature_class,
                           bands=None) -> BinaryMask:
    """Band-pass texture placeholder for dermoscopic feature regions.

    Difference of Gaussians on luminance, signed by the class polarity,
    thresholded at ``rel_threshold`` of the peak in-lesion response, and
    clipped to the lesion. Deterministic; empty when the lesion interior
    is flat.
    """
    bands = bands or FEATURE_BANDS
    if feature_class not in bands:
        raise UnknownProviderError(
            f"unknown feature class {feature_class!r}; expected one of {sorted(bands)}"
        )
    sigma_fine, sigma_coarse, polarity, rel_threshold = bands[feature_class]
    y, _, _ = rgb_to_yuv(img)

    def smooth(sigma):
        size = max(3, int(2 * round(3 * sigma) + 1))
        return gaussian_filter(y, size, sigma).values

    response = (smooth(sigma_fine) - smooth(sigma_coarse)) * polarity
    inside = lesion_mask.bits
    if not inside.any():
        return BinaryMask(np.zeros_like(inside))
    peak = float(response[inside].max(initial=0.0))
    if peak <= 1e-12:
        return BinaryMask(np.zeros_like(inside))
    return BinaryMask((response >= rel_threshold * peak) & inside)


def build_default_registry(binary_model, multi8_model, cv_params, mm_per_pixel,
                           feature_masks_available=True) -> Registry:
    """Registry with the shipped baselines: the linear ABCD classifiers, the
    contour-evolution segmenter, and the heuristic feature-mask provider."""
    from . import pipeline  # deferred: pipeline imports providers' siblings
    from .segmentation import segment_image

    registry = Registry()
    registry.register(
        ProviderDescriptor(CLASSIFIER, binary_model.model_id, taxonomy=binary_model.taxonomy),
        pipeline.ImageClassifier(binary_model, cv_params, mm_per_pixel),
        default=True,
    )
    if multi8_model is not None:
        registry.register(
            ProviderDescriptor(CLASSIFIER, multi8_model.model_id, taxonomy=multi8_model.taxonomy),
            pipeline.ImageClassifier(multi8_model, cv_params, mm_per_pixel),
        )
    registry.register(
        ProviderDescriptor(SEGMENTER, "contour-evolution"),
        lambda img: segment_image(img, cv_params),
        default=True,
    )
    registry.register(
        ProviderDescriptor(
            FEATURE_MASK, "heuristic-bandpass", available=feature_masks_available
        ),
        heuristic_feature_mask,
        default=True,
    )
    return registry.seal()
