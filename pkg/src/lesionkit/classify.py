"""Classifier contract, trainable linear baseline, and confidence scoring.

The baseline model is a standardized linear classifier over the 11-entry
ABCD feature vector, trained by full-batch gradient descent with a
backtracking line search (L2-regularized multinomial logistic loss by
default, multiclass hinge as an alternative). It is deliberately small:
heavier models plug in through the provider registry without changing any
caller.

Confidence presentation rescales a class probability p onto the range
above the uniform threshold u = 1/n_classes::

    c = (p - u) / (1.0 - u) * 100        shown only when p > u

so pure uncertainty maps to 0% and certainty to 100%.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, TrainingError

FEATURE_NAMES = (
    "asym_vertical_pct",
    "asym_horizontal_pct",
    "dist_white",
    "dist_red",
    "dist_light_brown",
    "dist_dark_brown",
    "dist_blue_gray",
    "dist_black",
    "irregularity_index",
    "diameter_h_mm",
    "diameter_v_mm",
)
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class ClassTaxonomy:
    labels: tuple
    kind: str  # "binary" or "multi8"

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise InvalidParameterError("taxonomy labels must be unique")
        if self.kind == "binary" and tuple(self.labels) != ("benign", "malignant"):
            raise InvalidParameterError(
                "binary taxonomy is fixed to (benign, malignant) in that order"
            )

    @property
    def n_classes(self):
        return len(self.labels)

    def index(self, label):
        return self.labels.index(label)


BINARY = ClassTaxonomy(("benign", "malignant"), "binary")
MULTI8 = ClassTaxonomy(("MEL", "NV", "BCC", "AK", "BKL", "DF", "VASC", "SCC"), "multi8")

TAXONOMIES = {"binary": BINARY, "multi8": MULTI8}


@dataclass
class Prediction:
    """Probability distribution over a taxonomy."""

    probs: np.ndarray
    taxonomy: ClassTaxonomy

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.shape != (self.taxonomy.n_classes,):
            raise InvalidInputError(
                f"expected {self.taxonomy.n_classes} probabilities, got {self.probs.shape}"
            )
        if np.any(self.probs < -1e-12) or np.any(self.probs > 1 + 1e-12):
            raise InvalidInputError("probabilities must lie in [0, 1]")
        if abs(float(self.probs.sum()) - 1.0) > 1e-6:
            raise InvalidInputError(f"probabilities sum to {self.probs.sum()}, not 1")

    def top_label(self):
        return self.taxonomy.labels[int(np.argmax(self.probs))]


@dataclass
class ConfidenceEntry:
    label: str
    p: float
    confidence_pct: float


@dataclass
class ConfidenceReport:
    entries: list


def confidence(pred: Prediction) -> ConfidenceReport:
    """Entries for every class with p strictly above uniform, best first.

    Ties in p are broken by taxonomy order so the report is deterministic.
    """
    n = pred.taxonomy.n_classes
    u = 1.0 / n
    entries = [
        ConfidenceEntry(label, float(p), (float(p) - u) / (1.0 - u) * 100.0)
        for label, p in zip(pred.taxonomy.labels, pred.probs)
        if p > u
    ]
    entries.sort(key=lambda e: -e.p)  # stable: equal p keeps taxonomy order
    return ConfidenceReport(entries)


def malignancy_color(pred: Prediction) -> str:
    """Hex color for the malignancy probability of a binary prediction.

    Linear green -> yellow -> red ramp with stops #00ff00 at 0,
    #ffff00 at 0.5, #ff0000 at 1.
    """
    if pred.taxonomy.kind != "binary":
        raise InvalidInputError("malignancy color needs the binary taxonomy")
    p = float(pred.probs[1])
    if p < 0.5:
        r, g = round(2 * p * 255), 255
    else:
        r, g = 255, round((2 - 2 * p) * 255)
    return f"#{r:02x}{g:02x}00"


def feature_vector(features) -> np.ndarray:
    """Raw 11-entry vector in FEATURE_NAMES order; centroid distances are
    normalized by the major rectangle side so they are scale-free."""
    major = features.rect_major_px
    norm = major if major > 0 else 1.0
    return np.array(
        [
            features.asym_vertical_pct,
            features.asym_horizontal_pct,
            *[d / norm for d in features.centroid_distances],
            features.irregularity_index,
            features.diameter_h_mm,
            features.diameter_v_mm,
        ],
        dtype=np.float64,
    )


def featurize(features, means=None, scales=None) -> np.ndarray:
    """Standardized feature vector: (raw - means) / scales."""
    x = feature_vector(features)
    if means is not None:
        x = x - np.asarray(means, dtype=np.float64)
    if scales is not None:
        x = x / np.asarray(scales, dtype=np.float64)
    return x


@dataclass
class TrainConfig:
    loss: str = "logistic"  # or "hinge"
    l2: float = 1e-3
    max_epochs: int = 500
    seed: int = 42
    tol: float = 1e-10
    initial_step: float = 1.0


@dataclass
class LinearModel:
    weights: np.ndarray  # (n_classes, n_features)
    bias: np.ndarray  # (n_classes,)
    feature_means: np.ndarray
    feature_scales: np.ndarray
    taxonomy: ClassTaxonomy
    loss_kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        self.feature_means = np.asarray(self.feature_means, dtype=np.float64)
        self.feature_scales = np.asarray(self.feature_scales, dtype=np.float64)
        if not (
            np.all(np.isfinite(self.weights))
            and np.all(np.isfinite(self.bias))
            and np.all(np.isfinite(self.feature_means))
            and np.all(np.isfinite(self.feature_scales))
        ):
            raise InvalidInputError("model parameters must be finite")
        if np.any(self.feature_scales <= 0):
            raise InvalidInputError("feature scales must be > 0")

    @property
    def model_id(self):
        return self.metadata.get("model_id", "unnamed-linear-model")

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "lesionkit-model",
                "version": 1,
                "taxonomy": {"kind": self.taxonomy.kind, "labels": list(self.taxonomy.labels)},
                "loss_kind": self.loss_kind,
                "weights": self.weights.tolist(),
                "bias": self.bias.tolist(),
                "feature_means": self.feature_means.tolist(),
                "feature_scales": self.feature_scales.tolist(),
                "feature_names": list(FEATURE_NAMES),
                "metadata": self.metadata,
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        doc = json.loads(text)
        if doc.get("format") != "lesionkit-model":
            raise InvalidInputError("not a lesionkit model file")
        if doc.get("version") != 1:
            raise InvalidInputError(f"unsupported model version {doc.get('version')}")
        tax_doc = doc["taxonomy"]
        kind = tax_doc["kind"]
        taxonomy = TAXONOMIES.get(kind) or ClassTaxonomy(tuple(tax_doc["labels"]), kind)
        return cls(
            weights=np.array(doc["weights"]),
            bias=np.array(doc["bias"]),
            feature_means=np.array(doc["feature_means"]),
            feature_scales=np.array(doc["feature_scales"]),
            taxonomy=taxonomy,
            loss_kind=doc["loss_kind"],
            metadata=doc.get("metadata", {}),
        )

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def _softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def logistic_loss_and_grad(weights, bias, x, y_onehot, l2):
    """Mean cross-entropy of softmax scores + 0.5*l2*||W||^2 (bias excluded)."""
    n = x.shape[0]
    p = _softmax(x @ weights.T + bias)
    eps = 1e-15
    loss = -np.mean(np.sum(y_onehot * np.log(p + eps), axis=1))
    loss += 0.5 * l2 * float((weights * weights).sum())
    diff = (p - y_onehot) / n
    grad_w = diff.T @ x + l2 * weights
    grad_b = diff.sum(axis=0)
    return loss, grad_w, grad_b


def hinge_loss_and_grad(weights, bias, x, y_onehot, l2):
    """Mean multiclass hinge (max over wrong classes of 1 + margin) +
    0.5*l2*||W||^2; subgradient where the max is attained."""
    n = x.shape[0]
    scores = x @ weights.T + bias
    true_idx = np.argmax(y_onehot, axis=1)
    true_scores = scores[np.arange(n), true_idx]
    margins = scores - true_scores[:, None] + 1.0
    margins[np.arange(n), true_idx] = -np.inf
    worst = np.argmax(margins, axis=1)
    viol = margins[np.arange(n), worst]
    active = viol > 0
    loss = float(np.where(active, viol, 0.0).mean())
    loss += 0.5 * l2 * float((weights * weights).sum())
    g = np.zeros_like(y_onehot)
    rows = np.arange(n)[active]
    g[rows, worst[active]] += 1.0
    g[rows, true_idx[active]] -= 1.0
    g /= n
    grad_w = g.T @ x + l2 * weights
    grad_b = g.sum(axis=0)
    return loss, grad_w, grad_b


LOSS_FUNCTIONS = {"logistic": logistic_loss_and_grad, "hinge": hinge_loss_and_grad}


def train(features, labels, taxonomy: ClassTaxonomy, config: TrainConfig | None = None) -> LinearModel:
    """Fit the linear baseline on raw (unstandardized) feature rows.

    ``labels`` may be label names or taxonomy indices. Requires at least
    5 samples of every taxonomy class. Deterministic for a fixed seed; the
    per-epoch loss trace (non-increasing by construction of the
    backtracking search) is stored in ``metadata["loss_history"]``.
    """
    config = config or TrainConfig()
    if config.loss not in LOSS_FUNCTIONS:
        raise InvalidParameterError(f"unknown loss {config.loss!r}")
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise TrainingError(f"feature matrix must be 2-D, got shape {x.shape}")
    idx = np.array(
        [taxonomy.index(l) if isinstance(l, str) else int(l) for l in labels], dtype=int
    )
    if len(idx) != len(x):
        raise TrainingError("features and labels differ in length")
    counts = np.bincount(idx, minlength=taxonomy.n_classes)
    if np.count_nonzero(counts) < 2:
        raise TrainingError(
            f"need at least 2 classes, got only {np.count_nonzero(counts)}: "
            f"{dict(zip(taxonomy.labels, counts.tolist()))}"
        )
    if np.any(counts < 5):
        missing = [taxonomy.labels[i] for i in np.nonzero(counts < 5)[0]]
        raise TrainingError(
            f"need >= 5 samples per class, short on: {missing} "
            f"(counts {dict(zip(taxonomy.labels, counts.tolist()))})"
        )

    means = x.mean(axis=0)
    scales = x.std(axis=0)
    scales[scales < 1e-12] = 1.0
    xs = (x - means) / scales
    y_onehot = np.zeros((len(idx), taxonomy.n_classes))
    y_onehot[np.arange(len(idx)), idx] = 1.0

    rng = np.random.default_rng(config.seed)
    n_cls, n_feat = taxonomy.n_classes, x.shape[1]
    weights = rng.normal(0.0, 1e-3, size=(n_cls, n_feat))
    bias = np.zeros(n_cls)
    loss_fn = LOSS_FUNCTIONS[config.loss]

    loss, grad_w, grad_b = loss_fn(weights, bias, xs, y_onehot, config.l2)
    history = [loss]
    step = config.initial_step
    for _ in range(config.max_epochs):
        improved = False
        while step >= 1e-14:
            new_w = weights - step * grad_w
            new_b = bias - step * grad_b
            new_loss, new_gw, new_gb = loss_fn(new_w, new_b, xs, y_onehot, config.l2)
            if new_loss < loss:
                weights, bias = new_w, new_b
                loss, grad_w, grad_b = new_loss, new_gw, new_gb
                improved = True
                step *= 1.5  # gently re-open the step after an accepted move
                break
            step *= 0.5
        history.append(loss)
        if not improved or (len(history) > 1 and history[-2] - history[-1] < config.tol):
            break

    model = LinearModel(
        weights=weights,
        bias=bias,
        feature_means=means,
        feature_scales=scales,
        taxonomy=taxonomy,
        loss_kind=config.loss,
        metadata={
            "model_id": f"linear-{config.loss}-{taxonomy.kind}",
            "epochs_run": len(history) - 1,
            "final_loss": loss,
            "loss_history": history,
            "l2": config.l2,
            "seed": config.seed,
            "n_samples": int(len(idx)),
        },
    )
    return model


def predict(model: LinearModel, x) -> Prediction:
    """Class distribution for one raw feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.weights.shape[1],):
        raise InvalidInputError(
            f"expected feature vector of length {model.weights.shape[1]}, got {x.shape}"
        )
    xs = (x - model.feature_means) / model.feature_scales
    z = model.weights @ xs + model.bias
    return Prediction(_softmax(z), model.taxonomy)
