"""End-to-end analysis shared by the CLI, the HTTP service, and batch
evaluation: segment -> ABCD features -> feature vector -> classify.

The JSON payload builders live here so the CLI and the service emit
byte-compatible schemas.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from . import classify
from .abcd import AbcdFeatures, DisplayScores, extract_features, project_scores
from .classify import LinearModel, Prediction
from .imaging import RasterImage
from .segmentation import CVParams, SegmentationResult, segment_image


@dataclass
class AnalysisResult:
    segmentation: SegmentationResult
    features: AbcdFeatures
    scores: DisplayScores
    prediction: Prediction
    confidence: classify.ConfidenceReport
    timings_ms: dict


class ImageClassifier:
    """Classifier-provider implementation: full pipeline behind a model."""

    def __init__(self, model: LinearModel, cv_params: CVParams | None = None,
                 mm_per_pixel=None):
        from .abcd import DEFAULT_MM_PER_PIXEL

        self.model = model
        self.cv_params = cv_params or CVParams()
        self.mm_per_pixel = DEFAULT_MM_PER_PIXEL if mm_per_pixel is None else mm_per_pixel

    def __call__(self, img: RasterImage) -> Prediction:
        seg = segment_image(img, self.cv_params)
        features = extract_features(img, seg.mask, self.mm_per_pixel)
        return classify.predict(self.model, classify.feature_vector(features))


def analyze_image(img: RasterImage, model: LinearModel,
                  cv_params: CVParams | None = None, mm_per_pixel=None) -> AnalysisResult:
    from .abcd import DEFAULT_MM_PER_PIXEL

    cv_params = cv_params or CVParams()
    mm = DEFAULT_MM_PER_PIXEL if mm_per_pixel is None else mm_per_pixel
    timings = {}

    t0 = time.perf_counter()
    seg = segment_image(img, cv_params)
    timings["segment"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    features = extract_features(img, seg.mask, mm)
    timings["features"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    pred = classify.predict(model, classify.feature_vector(features))
    conf = classify.confidence(pred)
    timings["classify"] = (time.perf_counter() - t0) * 1000.0

    return AnalysisResult(seg, features, project_scores(features), pred, conf, timings)


def malignancy_score_fn(model: LinearModel, cv_params: CVParams | None = None,
                        mm_per_pixel=None):
    """p(malignant) scorer over images, for the evaluation harness."""
    classifier = ImageClassifier(model, cv_params, mm_per_pixel)

    def score(img: RasterImage) -> float:
        return float(classifier(img).probs[1])

    return score


# --- shared JSON payloads --------------------------------------------------

def features_payload(features: AbcdFeatures, scores: DisplayScores,
                     seg: SegmentationResult, mm_per_pixel, mm_source) -> dict:
    from .abcd import COLOR_NAMES

    region_by_color = {r.color: r for r in features.color_regions}
    return {
        "mm_per_pixel": mm_per_pixel,
        "mm_per_pixel_source": mm_source,
        "features": {
            "asym_vertical_pct": features.asym_vertical_pct,
            "asym_horizontal_pct": features.asym_horizontal_pct,
            "centroid_distances_px": {
                name: features.centroid_distances[i] for i, name in enumerate(COLOR_NAMES)
            },
            "irregularity_index": features.irregularity_index,
            "diameter_h_mm": features.diameter_h_mm,
            "diameter_v_mm": features.diameter_v_mm,
            "colors_present": list(features.colors_present),
            "color_regions": [
                {
                    "color": r.color,
                    "area_px": r.area_px,
                    "centroid": [r.centroid[0], r.centroid[1]],
                    "distance_px": features.centroid_distances[COLOR_NAMES.index(r.color)],
                }
                for r in features.color_regions
            ],
            "rect_major_px": features.rect_major_px,
            "rect_minor_px": features.rect_minor_px,
            "tilt_angle_deg": features.tilt_angle_deg,
        },
        "display_scores": {
            "A1": scores.A1,
            "A2": scores.A2,
            "B": scores.B,
            "D1": scores.D1,
            "D2": scores.D2,
        },
        "segmentation": {
            "iterations": seg.iterations_used,
            "converged": seg.converged,
        },
    }


def confidence_payload(pred: Prediction, report: classify.ConfidenceReport) -> dict:
    payload = {
        "taxonomy": pred.taxonomy.kind,
        "labels": list(pred.taxonomy.labels),
        "prediction": [float(p) for p in pred.probs],
        "confidence": [
            {"label": e.label, "p": e.p, "confidence_pct": e.confidence_pct}
            for e in report.entries
        ],
    }
    if pred.taxonomy.kind == "binary":
        payload["malignancy_color"] = classify.malignancy_color(pred)
    return payload


def analysis_payload(result: AnalysisResult, mm_per_pixel, mm_source) -> dict:
    payload = features_payload(
        result.features, result.scores, result.segmentation, mm_per_pixel, mm_source
    )
    payload["classification"] = confidence_payload(result.prediction, result.confidence)
    payload["timings_ms"] = result.timings_ms
    return payload
