"""Acceptance suite: one test per release criterion, strictest stated
tolerances, one printed verdict line each. Run with ``pytest -v -s``.
"""
import io
import time
import zipfile

import numpy as np
import pytest
from starlette.testclient import TestClient

from conftest import disk_bits, lesion_image, star_bits
from lesionkit.classify import (
    BINARY,
    Prediction,
    confidence,
    logistic_loss_and_grad,
    predict,
    train,
)
from lesionkit.errors import DegenerateSegmentationError
from lesionkit.evalharness import LabeledScore, sweep
from lesionkit.explain import RiseParams, rise
from lesionkit.imaging import (
    BinaryMask,
    FloatPlane,
    RasterImage,
    decode_mask_png,
    encode_png,
    gaussian_filter,
)
from lesionkit.segmentation import chan_vese_segment, clean_mask, jaccard
from lesionkit.service import ServiceConfig, create_app
from test_classify import finite_diff_grads, make_blobs


def verdict(name):
    print(f"\nACCEPTANCE PASS: {name}")


class TestAcceptance:
    def test_confidence_formula(self):
        """Worked confidence values, exact to 1e-9, in milliseconds."""
        t0 = time.perf_counter()
        rep = confidence(Prediction(np.array([0.75, 0.25]), BINARY))
        assert abs(rep.entries[0].confidence_pct - 50.0) < 1e-9
        rep = confidence(Prediction(np.array([1.0, 0.0]), BINARY))
        assert abs(rep.entries[0].confidence_pct - 100.0) < 1e-9
        # The narrative worked values in the source material round
        # differently from the displayed formula (0.51 -> "0.5%" vs the
        # formula's 2%; 0.67 -> "62.4%" vs 62.29%; 0.28 -> "17.4%" vs
        # 17.71%). The formula c = (p - u) / (1 - u) * 100 is normative
        # here; those prose numbers are treated as typos, not targets.
        rep = confidence(Prediction(np.array([0.51, 0.49]), BINARY))
        assert abs(rep.entries[0].confidence_pct - 2.0) < 1e-9
        elapsed = time.perf_counter() - t0
        assert elapsed < 0.1
        verdict(f"confidence formula (p=0.75 -> 50%, p=1 -> 100%, {elapsed * 1e3:.1f} ms)")

    def test_jaccard_against_set_count_oracle(self):
        """1,000 random 64x64 mask pairs: exact match with the independent
        intersection/union pixel-count oracle."""
        t0 = time.perf_counter()
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            a = rng.random((64, 64)) < rng.random()
            b = rng.random((64, 64)) < rng.random()
            inter = int(np.logical_and(a, b).sum())
            union = int(np.logical_or(a, b).sum())
            oracle = 1.0 if union == 0 else inter / union
            assert jaccard(BinaryMask(a), BinaryMask(b)) == oracle
        full = np.ones((64, 64), dtype=bool)
        empty = np.zeros((64, 64), dtype=bool)
        assert jaccard(BinaryMask(full), BinaryMask(full)) == 1.0
        assert jaccard(BinaryMask(full[:32].repeat(2, 0)), BinaryMask(full)) == 1.0
        half_a = full.copy()
        half_a[:, 32:] = False
        half_b = ~half_a
        assert jaccard(BinaryMask(half_a), BinaryMask(half_b)) == 0.0
        assert jaccard(BinaryMask(empty), BinaryMask(empty)) == 1.0
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0
        verdict(f"jaccard vs set-count oracle, 1000 pairs exact ({elapsed:.1f} s)")

    def test_segmentation_disk_energy_and_affine_invariance(self):
        """Noisy dark disk (r=20 on 100x100, smoothed SNR >= 5): J >= 0.95,
        per-sweep energy never increases, exact affine-intensity invariance,
        under 1 s per image."""
        rng = np.random.default_rng(7)
        bits = disk_bits(100, 20)
        clean_signal = np.where(bits, 60.0, 180.0)
        noisy = np.clip(clean_signal + rng.normal(0, 30.0, (100, 100)), 0, 255)
        smoothed = gaussian_filter(FloatPlane(noisy), 5, 1.0)
        residual = smoothed.values - gaussian_filter(FloatPlane(clean_signal), 5, 1.0).values
        snr = 120.0 / residual.std()
        assert snr >= 5.0, f"fixture SNR {snr:.1f} too low"

        t0 = time.perf_counter()
        result = chan_vese_segment(smoothed)
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0
        j = jaccard(BinaryMask(bits), clean_mask(result.mask))
        assert j >= 0.95

        trace = result.energy_trace
        assert all(b <= a for a, b in zip(trace, trace[1:])), "energy increased in a sweep"

        base = result.mask.bits
        for a, b in ((2.0, 17.0), (0.25, -3.0)):
            again = chan_vese_segment(FloatPlane(a * smoothed.values + b)).mask.bits
            assert np.array_equal(base, again), f"mask changed under I -> {a} I + {b}"

        with pytest.raises(DegenerateSegmentationError):
            chan_vese_segment(FloatPlane(np.full((50, 50), 9.9)))
        verdict(
            f"segmentation: disk J={j:.3f} >= 0.95, energy monotone, "
            f"affine-invariant ({elapsed * 1e3:.0f} ms)"
        )

    def test_abcd_descriptors(self):
        """Disk: irregularity 1.0 +/- 0.05, asymmetries <= 1%. Square:
        4/pi +/- 0.05. Diameters linear in mm/px to 1e-9. Eight asymmetry
        parameters, always."""
        from lesionkit.abcd import border_irregularity, diameters, extract_features

        t0 = time.perf_counter()
        bits = disk_bits(140, 50)
        img = lesion_image(bits, color_fg=(120, 80, 50))
        features = extract_features(img, BinaryMask(bits))
        assert abs(features.irregularity_index - 1.0) <= 0.05
        assert features.asym_vertical_pct <= 1.0
        assert features.asym_horizontal_pct <= 1.0
        assert len(features.centroid_distances) == 6  # + 2 overlaps = 8 params

        square = np.zeros((100, 100), dtype=bool)
        square[20:80, 20:80] = True
        i_sq = border_irregularity(BinaryMask(square))
        assert abs(i_sq - 4.0 / np.pi) <= 0.05

        from lesionkit.abcd import align

        lesion = align(img, BinaryMask(bits))
        for factor in (0.01, 0.033, 0.5, 2.0):
            d_h, d_v = diameters(lesion, factor)
            d_h2, d_v2 = diameters(lesion, 2 * factor)
            assert abs(d_h2 - 2 * d_h) < 1e-9
            assert abs(d_v2 - 2 * d_v) < 1e-9
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0
        verdict(
            f"abcd: disk I={features.irregularity_index:.3f}, square I={i_sq:.3f}, "
            f"diameters linear, 8 asymmetry params ({elapsed * 1e3:.0f} ms)"
        )

    def test_classifier_training_and_gradient(self):
        """Separable blobs train to 100%; analytic gradient matches central
        differences (rel err < 1e-4, 100 random instances); probabilities
        sum to 1 +/- 1e-6. Under 10 s."""
        t0 = time.perf_counter()
        rng = np.random.default_rng(42)
        x, y = make_blobs(rng, 50, [np.zeros(11), np.full(11, 4.0)])
        model = train(x, y, BINARY)
        hits = [int(np.argmax(predict(model, xi).probs)) == yi for xi, yi in zip(x, y)]
        assert np.mean(hits) == 1.0

        worst = 0.0
        for _ in range(100):
            n, d, c = int(rng.integers(3, 8)), int(rng.integers(2, 5)), int(rng.integers(2, 4))
            xs = rng.normal(0, 1, (n, d))
            ys = np.zeros((n, c))
            ys[np.arange(n), rng.integers(0, c, n)] = 1.0
            w = rng.normal(0, 1, (c, d))
            b = rng.normal(0, 1, c)
            l2 = float(rng.uniform(0, 0.1))
            _, gw, gb = logistic_loss_and_grad(w, b, xs, ys, l2)
            fw, fb = finite_diff_grads(logistic_loss_and_grad, w, b, xs, ys, l2)
            worst = max(
                worst,
                np.abs(gw - fw).max() / max(np.abs(fw).max(), 1e-12),
                np.abs(gb - fb).max() / max(np.abs(fb).max(), 1e-12),
            )
        assert worst < 1e-4

        for _ in range(50):
            p = predict(model, rng.normal(0, 10, 11))
            assert abs(p.probs.sum() - 1.0) < 1e-6
        elapsed = time.perf_counter() - t0
        assert elapsed < 10.0
        verdict(
            f"classifier: blobs 100%, gradient rel err {worst:.2e} < 1e-4 ({elapsed:.1f} s)"
        )

    def test_rise_saliency(self):
        """Constant classifier -> all-zero map. Patch oracle (N=2000, s=7,
        p=0.5, seeded): inside mean exceeds outside mean by >= 3 outside
        stds. Same seed -> byte-exact. Under 30 s."""
        t0 = time.perf_counter()
        img = RasterImage(np.full((90, 90, 3), 255, dtype=np.uint8))

        def constant(_):
            return Prediction(np.array([0.35, 0.65]), BINARY)

        flat = rise(img, constant, RiseParams(n_masks=100, seed=3, target_class=1))
        assert np.all(flat.values.values == 0.0)

        def patch_oracle(im):
            on = 1.0 if im.data[20:60, 30:70, 0].mean() > 0.5 * 255 else 0.0
            return Prediction(np.array([1.0 - on, on]), BINARY)

        params = RiseParams(n_masks=2000, grid_cells=7, p_on=0.5, seed=42, target_class=1)
        smap = rise(img, patch_oracle, params)
        inside = np.zeros((90, 90), dtype=bool)
        inside[20:60, 30:70] = True
        v = smap.values.values
        margin = (v[inside].mean() - v[~inside].mean()) / v[~inside].std()
        assert margin >= 3.0

        again = rise(img, patch_oracle, params)
        assert np.array_equal(smap.raw_accumulator.values, again.raw_accumulator.values)
        assert smap.values.values.tobytes() == again.values.values.tobytes()
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0
        verdict(f"rise: zero map, patch margin {margin:.2f} sigma >= 3, deterministic ({elapsed:.1f} s)")

    def test_evaluation_harness(self):
        """4-item hand confusion -> all metrics exactly 0.5 at t=0.5;
        perfect separation -> AUC 1; label-independent scores (n=2000) ->
        AUC 0.5 +/- 0.05; recall monotone over the full grid."""
        t0 = time.perf_counter()
        scores = [
            LabeledScore("tp", "malignant", 0.9),
            LabeledScore("fn", "malignant", 0.1),
            LabeledScore("fp", "benign", 0.8),
            LabeledScore("tn", "benign", 0.2),
        ]
        report = sweep(scores)
        row = next(r for r in report.per_threshold if r.threshold == 0.5)
        assert (row.precision, row.recall, row.f1, row.accuracy) == (0.5, 0.5, 0.5, 0.5)

        sep = [LabeledScore(f"b{i}", "benign", s) for i, s in enumerate((0.05, 0.1, 0.2))]
        sep += [LabeledScore(f"m{i}", "malignant", s) for i, s in enumerate((0.8, 0.9, 0.95))]
        assert sweep(sep).roc_auc == 1.0

        rng = np.random.default_rng(777)
        random_scores = [
            LabeledScore(f"b{i}", "benign", float(s)) for i, s in enumerate(rng.random(1000))
        ] + [
            LabeledScore(f"m{i}", "malignant", float(s)) for i, s in enumerate(rng.random(1000))
        ]
        auc = sweep(random_scores).roc_auc
        assert abs(auc - 0.5) <= 0.05

        recalls = [r.recall for r in sweep(random_scores).per_threshold]
        assert all(b <= a for a, b in zip(recalls, recalls[1:]))
        elapsed = time.perf_counter() - t0
        verdict(
            f"evaluation harness: exact 4-item fixture, AUC 1.0 / {auc:.3f} (random), "
            f"recall monotone ({elapsed:.1f} s)"
        )

    def test_rest_conformance(self, tmp_path):
        """The five documented endpoints return their documented shapes;
        deterministic responses are byte-compared; no UI assets needed."""
        t0 = time.perf_counter()
        root = tmp_path / "html"
        root.mkdir()
        (root / "hello.html").write_text("<html>ok</html>")
        config = ServiceConfig(
            static_root=str(root),
            feedback_path=str(tmp_path / "fb.jsonl"),
            artifact_cache_dir=str(tmp_path / "cache"),
        )
        disk_blob = encode_png(lesion_image(disk_bits(100, 20), noise=20.0, seed=7))
        with TestClient(create_app(config)) as client:
            # 1) model info
            doc = client.post("/model_info").json()
            assert isinstance(doc["binary_classification_model"], str)

            # 2) static content with inferred type
            resp = client.get("/html/hello.html")
            assert resp.status_code == 200
            assert resp.headers["content-type"].startswith("text/html")

            # 3) binary classification: filename + 2-element prediction
            r1 = client.post("/classify/binary", files={"file": ("x.png", disk_blob)})
            d1 = r1.json()
            assert set(d1) == {"filename", "prediction"}
            assert len(d1["prediction"]) == 2
            assert abs(sum(d1["prediction"]) - 1.0) < 1e-6
            r2 = client.post("/classify/binary", files={"file": ("x.png", disk_blob)})
            assert r1.content == r2.content  # byte-identical rerun

            # 4) segmentation: 1-channel PNG, same size, black/white only
            s1 = client.post("/segment", files={"file": ("x.png", disk_blob)})
            assert s1.headers["content-type"] == "image/png"
            mask = decode_mask_png(s1.content)
            assert (mask.width, mask.height) == (100, 100)
            from PIL import Image

            arr = np.asarray(Image.open(io.BytesIO(s1.content)))
            assert arr.ndim == 2 and set(np.unique(arr)) <= {0, 255}
            s2 = client.post("/segment", files={"file": ("x.png", disk_blob)})
            assert s1.content == s2.content

            # error contract: JSON body with an `error` field
            flat_blob = encode_png(lesion_image(np.zeros((60, 60), bool), bg=128.0))
            e = client.post("/segment", files={"file": ("flat.png", flat_blob)})
            assert e.headers["content-type"].startswith("application/json")
            assert "error" in e.json()

            # 5) feature extraction for every documented class + 404 contract
            for cls in ("globules", "streaks", "pigment_network",
                        "milia_like_cyst", "negative_network"):
                f = client.post(f"/extract_feature/{cls}", files={"file": ("x.png", disk_blob)})
                assert f.status_code == 200 and f.headers["content-type"] == "image/png"
                fmask = decode_mask_png(f.content)
                assert (fmask.width, fmask.height) == (100, 100)
            assert client.post(
                "/extract_feature/bogus", files={"file": ("x.png", disk_blob)}
            ).status_code == 404
        elapsed = time.perf_counter() - t0
        verdict(f"rest conformance: five documented endpoints, golden reruns byte-equal ({elapsed:.1f} s)")

    def test_feedback_durability(self, tmp_path):
        """A posted record survives a process restart; the store file is
        append-only (prior prefix hash unchanged by later writes)."""
        import hashlib

        fb = tmp_path / "fb.jsonl"
        config = ServiceConfig(
            feedback_path=str(fb), artifact_cache_dir=str(tmp_path / "cache")
        )
        payload = {
            "image_id": "deadbeef",
            "mask_class": "streaks",
            "image_size": [64, 64],
            "regions": [
                {"points": [[1, 1], [10, 1], [5, 9]], "action": "add"},
                {"points": [[20, 20], [30, 20], [25, 30]], "action": "remove"},
            ],
        }
        with TestClient(create_app(config)) as client:
            record_id = client.post("/feedback", json=payload).json()["record_id"]
            prefix = fb.read_bytes()
            prefix_hash = hashlib.sha256(prefix).hexdigest()

        with TestClient(create_app(config)) as reborn:
            fetched = reborn.get(f"/feedback/{record_id}")
            assert fetched.status_code == 200
            assert fetched.json()["regions"][1]["action"] == "remove"
            reborn.post("/feedback", json=payload)
            after = fb.read_bytes()
            assert len(after) > len(prefix)
            assert hashlib.sha256(after[: len(prefix)]).hexdigest() == prefix_hash
        verdict("feedback durability: restart-safe, append-only prefix verified")
