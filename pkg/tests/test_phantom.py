import numpy as np
import pytest

from skfb.phantom import (
    Ellipse,
    ellipse_table,
    pixel_grid,
    resize_bicubic,
    roi_catalog,
    shepp_logan_2d,
    stack_volume,
)


class TestEllipse:
    def test_axis_aligned_membership(self):
        e = Ellipse(2.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        assert e.contains(np.array(1.9), np.array(0.0))
        assert not e.contains(np.array(2.1), np.array(0.0))
        assert e.contains(np.array(0.0), np.array(0.99))
        assert not e.contains(np.array(0.0), np.array(1.01))

    def test_rotation_by_quarter_turn_swaps_axes(self):
        e = Ellipse(2.0, 1.0, 0.0, 0.0, np.pi / 2.0, 1.0)
        assert e.contains(np.array(0.0), np.array(1.9))
        assert not e.contains(np.array(1.9), np.array(0.0))

    def test_offcentre(self):
        e = Ellipse(0.5, 0.5, 1.0, 2.0, 0.0, 1.0)
        assert e.contains(np.array(1.3), np.array(2.3))
        assert not e.contains(np.array(0.0), np.array(0.0))

    def test_rejects_degenerate_axes(self):
        with pytest.raises(ValueError):
            Ellipse(0.0, 1.0, 0.0, 0.0, 0.0, 1.0)


class TestEllipseTable:
    def test_ten_components(self):
        table = ellipse_table()
        assert len(table) == 10

    def test_display_intensities(self):
        vals = [e.intensity for e in ellipse_table("modified")]
        assert vals == [1.0, -0.8, -0.2, -0.2] + [0.1] * 6

    def test_attenuation_intensities(self):
        vals = [e.intensity for e in ellipse_table("standard")]
        assert vals == [1.0, -0.98, -0.02, -0.02] + [0.01] * 6

    def test_geometry_shared_between_variants(self):
        mod = ellipse_table("modified")
        std = ellipse_table("standard")
        for a, b in zip(mod, std):
            assert (a.semi_a, a.semi_b, a.x0, a.y0, a.theta) == (
                b.semi_a,
                b.semi_b,
                b.x0,
                b.y0,
                b.theta,
            )

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            ellipse_table("toft")

    def test_tilted_pair_mirrors(self):
        table = ellipse_table()
        assert table[2].theta == pytest.approx(-table[3].theta)


class TestPixelGrid:
    def test_orientation(self):
        x, y = pixel_grid(4)
        np.testing.assert_allclose(x.ravel(), [-0.75, -0.25, 0.25, 0.75])
        np.testing.assert_allclose(y.ravel(), [0.75, 0.25, -0.25, -0.75])  # row 0 on top

    def test_broadcast_shapes(self):
        x, y = pixel_grid(8)
        assert x.shape == (1, 8)
        assert y.shape == (8, 1)


class TestPhantomImage:
    def test_centre_value(self):
        img = shepp_logan_2d(128)
        # head + brain + both ventricle lobes overlap the centre: 1 - 0.8 + 0 = 0.2
        assert img[64, 64] == pytest.approx(0.2, abs=1e-12)

    def test_corners_empty(self):
        img = shepp_logan_2d(64)
        assert img[0, 0] == 0.0
        assert img[-1, -1] == 0.0

    def test_range(self):
        img = shepp_logan_2d(128)
        assert img.min() >= 0.0
        assert img.max() <= 1.0
        assert img.max() == pytest.approx(1.0)  # the skull ring

    def test_outer_shell_mask_is_mirror_symmetric(self):
        # the head outline is centred on x = 0, so its coverage mask must be
        # symmetric under column reversal (the interior anatomy is not)
        x, y = pixel_grid(128)
        shell = ellipse_table()[0]
        mask = shell.contains(x, y)
        assert np.array_equal(mask, mask[:, ::-1])

    def test_skull_ring_bright(self):
        img = shepp_logan_2d(256)
        x, y = pixel_grid(256)
        shell = ellipse_table()[0].contains(x, y)
        brain = ellipse_table()[1].contains(x, y)
        ring = shell & ~brain
        np.testing.assert_allclose(img[ring], 1.0, atol=1e-12)

    def test_variants_differ(self):
        assert shepp_logan_2d(64, "modified")[32, 32] == pytest.approx(0.2)
        assert shepp_logan_2d(64, "standard")[32, 32] == pytest.approx(0.02)

    def test_clip_only_removes_rounding_dust(self):
        # the component intensities never sum outside [0, 1] in exact
        # arithmetic; clipping may only snap ~1e-16 cancellation residue
        raw = shepp_logan_2d(64, clip=False)
        clipped = shepp_logan_2d(64, clip=True)
        assert raw.min() > -1e-15
        np.testing.assert_allclose(clipped, raw, atol=1e-15)

    def test_size_floor(self):
        with pytest.raises(ValueError):
            shepp_logan_2d(4)

    def test_deterministic(self):
        assert np.array_equal(shepp_logan_2d(96), shepp_logan_2d(96))


class TestBicubicResize:
    def test_constant_everywhere(self):
        out = resize_bicubic(np.full((10, 10), 0.6), (23, 17))
        np.testing.assert_allclose(out, 0.6, atol=1e-9)

    def test_same_size_is_identity(self):
        rng = np.random.default_rng(42)
        img = rng.uniform(size=(9, 9))
        np.testing.assert_allclose(resize_bicubic(img, (9, 9)), img, atol=1e-12)

    def test_affine_ramp_reproduced_in_interior(self):
        rows = np.arange(12.0)[:, None]
        cols = np.arange(12.0)[None, :]
        img = 2.0 * rows + 3.0 * cols
        out = resize_bicubic(img, (24, 24))
        src_r = (np.arange(24) + 0.5) * 0.5 - 0.5
        src_c = (np.arange(24) + 0.5) * 0.5 - 0.5
        expected = 2.0 * src_r[:, None] + 3.0 * src_c[None, :]
        # away from the clamped border the cubic taps reproduce affine maps
        np.testing.assert_allclose(out[4:-4, 4:-4], expected[4:-4, 4:-4], atol=1e-9)

    def test_downscale_shape(self):
        out = resize_bicubic(np.zeros((400, 400)), (128, 128))
        assert out.shape == (128, 128)

    def test_rejects_small_source(self):
        with pytest.raises(ValueError):
            resize_bicubic(np.zeros((3, 8)), (8, 8))

    def test_rejects_tiny_target(self):
        with pytest.raises(ValueError):
            resize_bicubic(np.zeros((8, 8)), (1, 8))

    def test_rejects_3d(self):
        with pytest.raises(ValueError):
            resize_bicubic(np.zeros((4, 4, 4)), (8, 8))


class TestStackVolume:
    def test_replicates_slice(self):
        rng = np.random.default_rng(43)
        img = rng.uniform(size=(6, 7))
        vol = stack_volume(img, 5)
        assert vol.dims == (5, 6, 7)
        assert vol.grid == "cell"
        for k in range(5):
            np.testing.assert_array_equal(vol.data[k], img)

    def test_depth_one(self):
        vol = stack_volume(np.ones((4, 4)), 1)
        assert vol.dims == (1, 4, 4)

    def test_validation(self):
        with pytest.raises(ValueError):
            stack_volume(np.zeros(5), 3)
        with pytest.raises(ValueError):
            stack_volume(np.zeros((4, 4)), 0)


class TestRoiCatalog:
    def test_names_in_report_order(self):
        names = [roi.name for roi in roi_catalog()]
        assert names == [
            "White Matter",
            "Tumor",
            "CSF",
            "Liver Parenchyma",
            "Kidney Edge",
            "Aorta",
        ]

    def test_all_windows_are_20x20_inside_the_slice(self):
        for roi in roi_catalog():
            for lo, hi in roi.bounds:
                assert hi - lo == 20
                assert 0 <= lo and hi <= 128

    def test_tumor_window(self):
        tumor = next(r for r in roi_catalog() if r.name == "Tumor")
        assert tumor.bounds == ((30, 50), (80, 100))

    def test_windows_have_usable_statistics(self):
        # every catalogue window must have a nonzero mean and nonzero spread
        # on the working slice, so every ratio metric is well defined
        from skfb.core import extract_roi
        from skfb.metrics import si

        img = resize_bicubic(shepp_logan_2d(400), (128, 128))
        for roi in roi_catalog():
            window = extract_roi(img, roi)
            assert si(window) > 0.0
