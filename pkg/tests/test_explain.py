import numpy as np
import pytest

from conftest import disk_bits, lesion_image
from lesionkit.classify import BINARY, Prediction
from lesionkit.errors import ExplanationAbortedError, InvalidParameterError
from lesionkit.explain import (
    RiseParams,
    SaliencyMap,
    apply_mask,
    generate_masks,
    render_explanation,
    rise,
    saliency_artifacts,
)
from lesionkit.imaging import FloatPlane, RasterImage


def constant_classifier(k=0.6):
    def classify(img):
        return Prediction(np.array([1.0 - k, k]), BINARY)

    return classify


def patch_oracle(y0, x0, size):
    """1.0 for the target class iff the marked patch is >50% unmasked."""

    def classify(img):
        patch = img.data[y0:y0 + size, x0:x0 + size, 0].astype(np.float64)
        on = 1.0 if patch.mean() > 0.5 * 255 else 0.0
        return Prediction(np.array([1.0 - on, on]), BINARY)

    return classify


class TestGenerateMasks:
    def test_values_in_unit_range(self):
        params = RiseParams(n_masks=10, grid_cells=4, p_on=0.5, seed=1)
        for m in generate_masks(params, 33, 21):
            assert m.shape == (21, 33)
            assert m.min() >= 0.0 and m.max() <= 1.0

    def test_p_on_near_one_gives_all_ones(self):
        params = RiseParams(n_masks=5, grid_cells=4, p_on=1.0 - 1e-12, seed=3)
        for m in generate_masks(params, 16, 16):
            assert np.allclose(m, 1.0)

    def test_same_seed_identical_sequence(self):
        params = RiseParams(n_masks=8, grid_cells=5, p_on=0.4, seed=99)
        first = list(generate_masks(params, 24, 18))
        second = list(generate_masks(params, 24, 18))
        for a, b in zip(first, second):
            assert np.array_equal(a, b)

    def test_empirical_mean_matches_p_on(self):
        # Monte-Carlo oracle: grand mean over many masks approaches p_on
        params = RiseParams(n_masks=10_000, grid_cells=7, p_on=0.5, seed=42)
        total = 0.0
        count = 0
        for m in generate_masks(params, 20, 20):
            total += m.sum()
            count += m.size
        assert abs(total / count - 0.5) < 0.02

    def test_invalid_params_rejected(self):
        with pytest.raises(InvalidParameterError):
            RiseParams(n_masks=0).validate()
        with pytest.raises(InvalidParameterError):
            RiseParams(grid_cells=1).validate()
        with pytest.raises(InvalidParameterError):
            RiseParams(p_on=0.0).validate()
        with pytest.raises(InvalidParameterError):
            RiseParams(p_on=1.0).validate()


class TestRise:
    def test_constant_classifier_all_zero_map(self):
        img = lesion_image(disk_bits(40, 10))
        smap = rise(img, constant_classifier(), RiseParams(n_masks=50, seed=5, target_class=1))
        assert np.all(smap.values.values == 0.0)
        assert np.ptp(smap.raw_accumulator.values) < 1e-12

    def test_patch_oracle_saliency_concentrates(self):
        img = RasterImage(np.full((90, 90, 3), 255, dtype=np.uint8))
        params = RiseParams(n_masks=2000, grid_cells=7, p_on=0.5, seed=42, target_class=1)
        smap = rise(img, patch_oracle(20, 30, 40), params)
        inside = np.zeros((90, 90), dtype=bool)
        inside[20:60, 30:70] = True
        v = smap.values.values
        margin = (v[inside].mean() - v[~inside].mean()) / v[~inside].std()
        assert margin >= 3.0

    def test_deterministic_under_seed(self):
        img = lesion_image(disk_bits(30, 8))
        params = RiseParams(n_masks=40, seed=11, target_class=0)
        a = rise(img, constant_classifier(0.3), params)
        b = rise(img, constant_classifier(0.3), params)
        assert np.array_equal(a.raw_accumulator.values, b.raw_accumulator.values)

    def test_normalization_extremes(self):
        img = RasterImage(np.full((60, 60, 3), 255, dtype=np.uint8))
        params = RiseParams(n_masks=300, grid_cells=5, p_on=0.5, seed=2, target_class=1)
        smap = rise(img, patch_oracle(10, 10, 25), params)
        assert smap.values.values.min() == 0.0
        assert smap.values.values.max() == 1.0
        assert np.all(np.isfinite(smap.raw_accumulator.values))

    def test_half_runs_correlate_with_full_run(self):
        img = RasterImage(np.full((60, 60, 3), 255, dtype=np.uint8))
        oracle = patch_oracle(15, 15, 25)
        full = rise(img, oracle, RiseParams(n_masks=800, seed=1, target_class=1))
        halves = [
            rise(img, oracle, RiseParams(n_masks=400, seed=s, target_class=1))
            for s in (1, 2)
        ]
        for half in halves:
            r = np.corrcoef(
                half.raw_accumulator.values.ravel(), full.raw_accumulator.values.ravel()
            )[0, 1]
            assert r > 0.8

    def test_classifier_failure_aborts_with_cause(self):
        img = lesion_image(disk_bits(20, 5))

        def broken(_):
            raise RuntimeError("backend offline")

        with pytest.raises(ExplanationAbortedError) as exc:
            rise(img, broken, RiseParams(n_masks=5, seed=1, target_class=0))
        assert isinstance(exc.value.cause, RuntimeError)

    def test_target_defaults_to_top_class(self):
        img = lesion_image(disk_bits(20, 5))
        smap = rise(img, constant_classifier(0.8), RiseParams(n_masks=10, seed=1))
        assert smap.params_used.target_class == 1  # malignant has p=0.8


class TestApplyMask:
    def test_zero_mask_blacks_out(self):
        img = lesion_image(disk_bits(10, 3))
        out = apply_mask(img, np.zeros((10, 10)))
        assert np.all(out.data == 0)

    def test_unit_mask_identity(self):
        img = lesion_image(disk_bits(10, 3))
        out = apply_mask(img, np.ones((10, 10)))
        assert np.array_equal(out.data, img.data)


class TestRendering:
    def _map(self, size=20):
        vals = np.linspace(0, 1, size * size).reshape(size, size)
        return SaliencyMap(FloatPlane(vals), FloatPlane(vals), RiseParams(n_masks=1, target_class=0))

    def test_opacity_zero_keeps_image(self):
        img = lesion_image(disk_bits(20, 6))
        out = render_explanation(img, self._map(), 0.0)
        assert np.array_equal(out.data, img.data)

    def test_zero_map_renders_coldest_overlay(self):
        img = lesion_image(disk_bits(20, 6))
        zero = SaliencyMap(
            FloatPlane(np.zeros((20, 20))), FloatPlane(np.zeros((20, 20))),
            RiseParams(n_masks=1, target_class=0),
        )
        out = render_explanation(img, zero, 1.0)
        assert np.all(out.data == (0, 0, 255))

    def test_golden_blend_arithmetic(self):
        img = RasterImage(np.full((4, 4, 3), 100, dtype=np.uint8))
        ones = SaliencyMap(
            FloatPlane(np.ones((4, 4))), FloatPlane(np.ones((4, 4))),
            RiseParams(n_masks=1, target_class=0),
        )
        out = render_explanation(img, ones, 0.7)
        # hottest color (255, 0, 0) at opacity 0.7 over gray 100
        assert tuple(out.data[0, 0]) == (round(0.3 * 100 + 0.7 * 255), 30, 30)

    def test_artifact_bundle(self):
        img = lesion_image(disk_bits(16, 5))
        smap = self._map(16)
        bundle = saliency_artifacts(img, smap)
        assert set(bundle) == {"saliency16.png", "heatmap.png", "params.json"}
        assert bundle["saliency16.png"].startswith(b"\x89PNG")
        import json

        sidecar = json.loads(bundle["params.json"])
        assert sidecar["n_masks"] == 1
