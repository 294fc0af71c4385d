import numpy as np
import pytest

from lesionkit.errors import InvalidInputError, InvalidParameterError
from lesionkit.imaging import (
    HEAT_LUT,
    BinaryMask,
    FloatPlane,
    RasterImage,
    blend_overlay,
    colorize,
    decode_image,
    decode_mask_png,
    encode_mask_png,
    encode_png,
    gaussian_filter,
    gaussian_kernel_1d,
    resample_mask,
    rgb_to_hsv,
    rgb_to_yuv,
)


def solid(r, g, b, size=4):
    return RasterImage(np.full((size, size, 3), (r, g, b), dtype=np.uint8))


class TestRgbToYuv:
    def test_black_is_zero(self):
        y, u, v = rgb_to_yuv(solid(0, 0, 0))
        assert np.all(y.values == 0) and np.all(u.values == 0) and np.all(v.values == 0)

    def test_white_is_unit_luma_no_chroma(self):
        y, u, v = rgb_to_yuv(solid(255, 255, 255))
        assert np.allclose(y.values, 1.0)
        assert np.allclose(u.values, 0.0) and np.allclose(v.values, 0.0)

    def test_mid_gray_matches_hand_matrix(self):
        # (0.299 + 0.587 + 0.114) * 128/255 applied by hand
        y, u, v = rgb_to_yuv(solid(128, 128, 128))
        assert np.allclose(y.values, 128 / 255)
        assert abs(y.values[0, 0] - 0.502) < 1e-3
        assert np.allclose(u.values, 0.0) and np.allclose(v.values, 0.0)

    def test_hand_computed_chromatic_pixel(self):
        # (128, 64, 0): Y = (0.299*128 + 0.587*64)/255
        y, u, v = rgb_to_yuv(solid(128, 64, 0))
        y_exp = (0.299 * 128 + 0.587 * 64 + 0.114 * 0) / 255
        assert np.allclose(y.values, y_exp)
        assert np.allclose(u.values, 0.492099 * (0.0 - y_exp))
        assert np.allclose(v.values, 0.877318 * (128 / 255 - y_exp))

    def test_wrong_channel_count_rejected(self):
        gray = RasterImage(np.zeros((4, 4, 1), dtype=np.uint8))
        with pytest.raises(InvalidInputError):
            rgb_to_yuv(gray)

    def test_constant_image_yields_constant_planes(self, rng):
        r, g, b = rng.integers(0, 256, 3)
        planes = rgb_to_yuv(solid(r, g, b, size=7))
        for p in planes:
            assert np.ptp(p.values) == 0.0


class TestRgbToHsv:
    def test_primary_red(self):
        h, s, v = rgb_to_hsv(solid(255, 0, 0))
        assert np.all(h.values == 0) and np.all(s.values == 1) and np.all(v.values == 1)

    def test_black_achromatic_hue_zero(self):
        h, s, v = rgb_to_hsv(solid(0, 0, 0))
        assert np.all(h.values == 0) and np.all(s.values == 0) and np.all(v.values == 0)

    def test_hexcone_by_hand(self):
        # (128, 64, 0): max=128, delta=128 -> S=1, H=60*((64-0)/128)=30
        h, s, v = rgb_to_hsv(solid(128, 64, 0))
        assert np.allclose(h.values, 30.0)
        assert np.allclose(s.values, 1.0)
        assert np.allclose(v.values, 128 / 255)

    def test_hue_range(self, rng):
        arr = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
        h, s, v = rgb_to_hsv(RasterImage(arr))
        assert h.values.min() >= 0 and h.values.max() < 360
        assert s.values.min() >= 0 and s.values.max() <= 1
        assert v.values.min() >= 0 and v.values.max() <= 1

    def test_wrong_channels_rejected(self):
        with pytest.raises(InvalidInputError):
            rgb_to_hsv(RasterImage(np.zeros((2, 2, 1), dtype=np.uint8)))


class TestGaussianFilter:
    def test_constant_plane_preserved(self):
        p = FloatPlane(np.full((9, 9), 3.25))
        out = gaussian_filter(p, 5, 1.0)
        assert np.allclose(out.values, 3.25)

    def test_kernel_normalized(self):
        k = gaussian_kernel_1d(5, 1.0)
        assert abs(k.sum() - 1.0) < 1e-9

    def test_impulse_response_matches_kernel_outer_product(self):
        # independent oracle: sample the 2-D Gaussian directly and normalize
        x = np.arange(-2, 3, dtype=float)
        g2 = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / 2.0)
        g2 /= g2.sum()
        plane = np.zeros((11, 11))
        plane[5, 5] = 1.0
        out = gaussian_filter(FloatPlane(plane), 5, 1.0).values
        assert np.allclose(out[3:8, 3:8], g2, atol=1e-12)
        assert np.allclose(out.sum(), 1.0)

    def test_linearity(self, rng):
        p = rng.random((12, 17))
        q = rng.random((12, 17))
        a, b = 2.5, -1.75
        lhs = gaussian_filter(FloatPlane(a * p + b * q), 5, 1.0).values
        rhs = a * gaussian_filter(FloatPlane(p), 5, 1.0).values + b * gaussian_filter(
            FloatPlane(q), 5, 1.0
        ).values
        assert np.allclose(lhs, rhs, atol=1e-6)

    def test_even_kernel_rejected(self):
        with pytest.raises(InvalidParameterError):
            gaussian_filter(FloatPlane(np.zeros((5, 5))), 4, 1.0)

    def test_nonpositive_sigma_rejected(self):
        with pytest.raises(InvalidParameterError):
            gaussian_filter(FloatPlane(np.zeros((5, 5))), 5, 0.0)

    def test_tiny_plane_mirrors_without_error(self):
        out = gaussian_filter(FloatPlane(np.array([[1.0, 2.0]])), 5, 1.0)
        assert out.values.shape == (1, 2)


class TestBlendOverlay:
    def test_opacity_zero_is_identity(self, rng):
        base = RasterImage(rng.integers(0, 256, (6, 6, 3), dtype=np.uint8))
        over = RasterImage(rng.integers(0, 256, (6, 6, 3), dtype=np.uint8))
        assert np.array_equal(blend_overlay(base, over, 0.0).data, base.data)

    def test_opacity_one_is_overlay(self, rng):
        base = RasterImage(rng.integers(0, 256, (6, 6, 3), dtype=np.uint8))
        over = RasterImage(rng.integers(0, 256, (6, 6, 3), dtype=np.uint8))
        assert np.array_equal(blend_overlay(base, over, 1.0).data, over.data)

    def test_arithmetic(self):
        base = solid(100, 100, 100)
        over = solid(200, 200, 200)
        out = blend_overlay(base, over, 0.9)
        assert np.all(out.data == 190)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            blend_overlay(solid(0, 0, 0, size=4), solid(0, 0, 0, size=5), 0.5)


class TestColorize:
    def test_zero_plane_is_coldest(self):
        out = colorize(FloatPlane(np.zeros((3, 3))))
        assert np.all(out.data == (0, 0, 255))

    def test_one_plane_is_hottest(self):
        out = colorize(FloatPlane(np.ones((3, 3))))
        assert np.all(out.data == (255, 0, 0))

    def test_documented_midpoint(self):
        # 0.5 -> LUT index rint(0.5*255) = 128 -> (1, 254, 0)
        out = colorize(FloatPlane(np.full((2, 2), 0.5)))
        assert tuple(out.data[0, 0]) == (1, 254, 0)
        assert tuple(HEAT_LUT[128]) == (1, 254, 0)

    def test_ramp_monotone(self):
        lut = HEAT_LUT.astype(int)
        assert np.all(np.diff(lut[:, 0]) >= 0)  # red never decreases
        assert np.all(np.diff(lut[:, 2]) <= 0)  # blue never increases

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidInputError):
            colorize(FloatPlane(np.full((2, 2), 1.5)))


class TestResampleMask:
    def test_identity(self, rng):
        m = BinaryMask(rng.random((10, 14)) > 0.5)
        assert np.array_equal(resample_mask(m, 14, 10).bits, m.bits)

    def test_checkerboard_doubles_to_blocks(self):
        m = BinaryMask(np.array([[True, False], [False, True]]))
        out = resample_mask(m, 4, 4)
        want = np.array(
            [
                [1, 1, 0, 0],
                [1, 1, 0, 0],
                [0, 0, 1, 1],
                [0, 0, 1, 1],
            ],
            dtype=bool,
        )
        assert np.array_equal(out.bits, want)

    def test_output_strictly_binary_and_area_preserved(self, rng):
        yy, xx = np.mgrid[0:180, 0:180]
        m = BinaryMask((xx - 90) ** 2 + (yy - 90) ** 2 <= 50 ** 2)
        out = resample_mask(m, 600, 450)
        assert out.bits.dtype == bool
        ratio_in = m.area() / (180 * 180)
        ratio_out = out.area() / (600 * 450)
        assert abs(ratio_in - ratio_out) / ratio_in < 0.02


class TestCodecs:
    def test_png_roundtrip(self, rng):
        img = RasterImage(rng.integers(0, 256, (20, 30, 3), dtype=np.uint8))
        back = decode_image(encode_png(img))
        assert np.array_equal(back.data, img.data)

    def test_mask_png_black_white_roundtrip(self, rng):
        m = BinaryMask(rng.random((15, 11)) > 0.5)
        data = encode_mask_png(m)
        arr = np.asarray(__import__("PIL.Image", fromlist=["Image"]).open(
            __import__("io").BytesIO(data)
        ))
        assert set(np.unique(arr)) <= {0, 255}
        assert np.array_equal(decode_mask_png(data).bits, m.bits)

    def test_alpha_png_rejected(self):
        import io

        from PIL import Image

        rgba = Image.new("RGBA", (4, 4), (10, 20, 30, 128))
        buf = io.BytesIO()
        rgba.save(buf, format="PNG")
        with pytest.raises(InvalidInputError):
            decode_image(buf.getvalue())

    def test_jpeg_decodes(self):
        import io

        from PIL import Image

        rgb = Image.new("RGB", (8, 6), (100, 50, 25))
        buf = io.BytesIO()
        rgb.save(buf, format="JPEG")
        img = decode_image(buf.getvalue())
        assert (img.width, img.height, img.channels) == (8, 6, 3)

    def test_garbage_rejected(self):
        with pytest.raises(InvalidInputError):
            decode_image(b"not an image at all")
