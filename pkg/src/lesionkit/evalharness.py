"""Threshold-sweep evaluation of binary classifiers.

Scores are malignancy probabilities in [0, 1]; at threshold t an item is
called malignant iff score >= t. The default grid is 0.00..1.00 in steps
of 0.01 (101 rows), inclusive of both ends so the ROC curve reaches its
corners by construction. Ratios with an empty denominator are reported as
0 and the metric name is listed in the row's ``undefined`` field - NaN
would poison the JSON consumed by the charts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError, InvalidInputError

BENIGN = "benign"
MALIGNANT = "malignant"


@dataclass
class LabeledScore:
    item_id: str
    truth: str  # "benign" | "malignant"
    score: float

    def __post_init__(self):
        if self.truth not in (BENIGN, MALIGNANT):
            raise InvalidInputError(f"truth must be benign|malignant, got {self.truth!r}")
        if not np.isfinite(self.score) or not 0.0 <= self.score <= 1.0:
            raise InvalidInputError(f"score must be finite in [0, 1], got {self.score}")


@dataclass
class ThresholdRow:
    threshold: float
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    specificity: float
    accuracy: float
    f1: float
    fpr: float
    tpr: float
    undefined: list = field(default_factory=list)


@dataclass
class EvalReport:
    per_threshold: list
    roc_points: list  # (fpr, tpr)
    pr_points: list  # (recall, precision)
    roc_auc: float
    failures: list = field(default_factory=list)
    items: list = field(default_factory=list)  # the scored inputs, for per-image views

    def to_dict(self):
        return {
            "items": [
                {"item_id": s.item_id, "truth": s.truth, "score": s.score} for s in self.items
            ],
            "per_threshold": [
                {
                    "threshold": r.threshold,
                    "tp": r.tp,
                    "fp": r.fp,
                    "tn": r.tn,
                    "fn": r.fn,
                    "precision": r.precision,
                    "recall": r.recall,
                    "specificity": r.specificity,
                    "accuracy": r.accuracy,
                    "f1": r.f1,
                    "fpr": r.fpr,
                    "tpr": r.tpr,
                    "undefined": r.undefined,
                }
                for r in self.per_threshold
            ],
            "roc_points": [[p[0], p[1]] for p in self.roc_points],
            "pr_points": [[p[0], p[1]] for p in self.pr_points],
            "roc_auc": self.roc_auc,
            "failures": self.failures,
        }

    def to_csv(self):
        header = (
            "threshold,tp,fp,tn,fn,precision,recall,specificity,accuracy,f1,fpr,tpr,undefined"
        )
        lines = [header]
        for r in self.per_threshold:
            lines.append(
                f"{r.threshold},{r.tp},{r.fp},{r.tn},{r.fn},{r.precision},{r.recall},"
                f"{r.specificity},{r.accuracy},{r.f1},{r.fpr},{r.tpr},"
                f"{';'.join(r.undefined)}"
            )
        return "\n".join(lines) + "\n"


def default_thresholds():
    return [round(t, 2) for t in np.linspace(0.0, 1.0, 101)]


def _ratio(num, den, name, undefined):
    if den == 0:
        undefined.append(name)
        return 0.0
    return num / den


def confusion_at(scores, threshold):
    tp = fp = tn = fn = 0
    for s in scores:
        called_malignant = s.score >= threshold
        if s.truth == MALIGNANT:
            if called_malignant:
                tp += 1
            else:
                fn += 1
        else:
            if called_malignant:
                fp += 1
            else:
                tn += 1
    return tp, fp, tn, fn


def _row_at(scores, t):
    tp, fp, tn, fn = confusion_at(scores, t)
    undefined = []
    precision = _ratio(tp, tp + fp, "precision", undefined)
    recall = _ratio(tp, tp + fn, "recall", undefined)
    specificity = _ratio(tn, tn + fp, "specificity", undefined)
    accuracy = _ratio(tp + tn, tp + fp + tn + fn, "accuracy", undefined)
    f1 = _ratio(2 * precision * recall, precision + recall, "f1", undefined)
    fpr = _ratio(fp, fp + tn, "fpr", undefined)
    return ThresholdRow(
        threshold=float(t),
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        precision=precision,
        recall=recall,
        specificity=specificity,
        accuracy=accuracy,
        f1=f1,
        fpr=fpr,
        tpr=recall,
        undefined=undefined,
    )


def sweep(scores, thresholds=None, failures=None) -> EvalReport:
    """Confusion metrics over a threshold grid, plus ROC/PR curves.

    The ROC and PR curves (and the AUC) are sampled at the grid *and* at
    every distinct score, which makes the AUC exactly invariant under
    strictly monotone rescaling of the scores; the extra curve points
    collapse onto grid points whenever no score falls between them.
    """
    if not scores:
        raise EvaluationError("no scores to evaluate")
    thresholds = default_thresholds() if thresholds is None else list(thresholds)
    rows = [_row_at(scores, t) for t in thresholds]
    curve_ts = sorted(set(float(t) for t in thresholds) | set(s.score for s in scores))
    curve = [_row_at(scores, t) for t in curve_ts]
    roc_points = [(r.fpr, r.tpr) for r in curve]
    pr_points = [(r.recall, r.precision) for r in curve]
    return EvalReport(
        per_threshold=rows,
        roc_points=roc_points,
        pr_points=pr_points,
        roc_auc=roc_auc(roc_points),
        failures=list(failures or []),
        items=list(scores),
    )


def roc_auc(roc_points) -> float:
    """Trapezoidal area under the fpr-sorted ROC polyline; the (0,0) and
    (1,1) endpoints are appended when missing."""
    pts = [(float(f), float(t)) for f, t in roc_points]
    if (0.0, 0.0) not in pts:
        pts.append((0.0, 0.0))
    if (1.0, 1.0) not in pts:
        pts.append((1.0, 1.0))
    pts.sort()
    area = 0.0
    for (f0, t0), (f1, t1) in zip(pts, pts[1:]):
        area += (f1 - f0) * (t0 + t1) / 2.0
    return area


def score_dataset(benign_items, malignant_items, score_fn):
    """Score two labeled item sets with ``score_fn(source) -> p_malignant``.

    Items are (item_id, source) pairs; per-item failures are collected
    rather than fatal, but an entirely failed run (or an empty input set)
    raises :class:`EvaluationError`.
    """
    if not benign_items:
        raise EvaluationError("benign set is empty")
    if not malignant_items:
        raise EvaluationError("malignant set is empty")
    scores = []
    failures = []
    for truth, items in ((BENIGN, benign_items), (MALIGNANT, malignant_items)):
        for item_id, source in items:
            try:
                scores.append(LabeledScore(item_id, truth, float(score_fn(source))))
            except Exception as exc:
                failures.append({"item_id": item_id, "error": str(exc)})
    if not scores:
        raise EvaluationError(f"all {len(failures)} items failed; first: {failures[0]['error']}")
    return scores, failures
