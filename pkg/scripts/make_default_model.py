"""Regenerate the packaged baseline models.

The shipped models are linear classifiers trained on *synthetic* ABCD
feature distributions (benign: small, regular, few colors; malignant:
large, irregular, asymmetric). They exist so the service and CLI work out
of the box and so the malignancy direction of the features is sensible;
they are not clinically trained. Run from the repo root:

    python scripts/make_default_model.py
"""
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lesionkit.classify import BINARY, MULTI8, TrainConfig, predict, train  # noqa: E402

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "lesionkit" / "models"


def sample_features(rng, n, asym, irregularity, diameter, dist_scale):
    """Plausible raw ABCD vectors around the given regime."""
    asym_v = np.clip(rng.normal(asym, asym * 0.35 + 1.0, n), 0, 100)
    asym_h = np.clip(rng.normal(asym, asym * 0.35 + 1.0, n), 0, 100)
    dists = np.clip(rng.normal(dist_scale, dist_scale * 0.5 + 0.01, (n, 6)), 0, 1)
    irr = 1.0 + np.clip(rng.normal(irregularity - 1.0, 0.15 * irregularity, n), 0, None)
    d_h = np.clip(rng.normal(diameter, diameter * 0.25, n), 0.3, None)
    d_v = np.clip(d_h * rng.uniform(0.6, 1.0, n), 0.3, None)
    return np.column_stack([asym_v, asym_h, dists, irr, d_h, d_v])


def binary_dataset(rng, n_per_class=400):
    benign = sample_features(rng, n_per_class, asym=8.0, irregularity=1.15,
                             diameter=3.0, dist_scale=0.05)
    malignant = sample_features(rng, n_per_class, asym=35.0, irregularity=1.9,
                                diameter=8.0, dist_scale=0.2)
    x = np.vstack([benign, malignant])
    y = np.array([0] * n_per_class + [1] * n_per_class)
    return x, y


def multi8_dataset(rng, n_per_class=200):
    # per-class regimes: melanoma-like classes larger/rougher, benign
    # nevus-like smaller/rounder; purely synthetic placement
    regimes = {
        "MEL": (40.0, 2.1, 9.0, 0.25),
        "NV": (8.0, 1.12, 3.5, 0.05),
        "BCC": (22.0, 1.6, 6.0, 0.12),
        "AK": (15.0, 1.45, 4.0, 0.10),
        "BKL": (12.0, 1.3, 5.0, 0.08),
        "DF": (6.0, 1.1, 2.5, 0.04),
        "VASC": (10.0, 1.2, 3.0, 0.15),
        "SCC": (28.0, 1.75, 7.0, 0.18),
    }
    xs, ys = [], []
    for i, label in enumerate(MULTI8.labels):
        asym, irr, diam, dist = regimes[label]
        xs.append(sample_features(rng, n_per_class, asym, irr, diam, dist))
        ys.extend([i] * n_per_class)
    return np.vstack(xs), np.array(ys)


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(2024)

    x, y = binary_dataset(rng)
    model = train(x, y, BINARY, TrainConfig(seed=42))
    model.metadata["model_id"] = "abcd-linear-binary-synthetic-v1"
    model.metadata["training_data"] = "synthetic ABCD regimes, not clinical"
    acc = np.mean([int(np.argmax(predict(model, xi).probs)) == yi for xi, yi in zip(x, y)])
    model.save(OUT_DIR / "binary_baseline.json")
    print(f"binary: train accuracy {acc:.3f} -> {OUT_DIR / 'binary_baseline.json'}")

    x, y = multi8_dataset(rng)
    model = train(x, y, MULTI8, TrainConfig(seed=42))
    model.metadata["model_id"] = "abcd-linear-multi8-synthetic-v1"
    model.metadata["training_data"] = "synthetic ABCD regimes, not clinical"
    acc = np.mean([int(np.argmax(predict(model, xi).probs)) == yi for xi, yi in zip(x, y)])
    model.save(OUT_DIR / "multi8_baseline.json")
    print(f"multi8: train accuracy {acc:.3f} -> {OUT_DIR / 'multi8_baseline.json'}")


if __name__ == "__main__":
    main()
