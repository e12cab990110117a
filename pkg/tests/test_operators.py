import numpy as np
import pytest

from skfb.core import Volume, lp_distance
from skfb.kernels import discrete_gaussian_stencil, make_box, make_bspline3
from skfb.operators import (
    ConfigError,
    apply_operator,
    bilateral_filter,
    block_mean,
    cell_means_from_function,
    gaussian_filter,
    iterated_gaussian,
    kantorovich_cell_average,
    kantorovich_point_sample,
    pointwise_error,
)


def dense_gaussian_2d(arr: np.ndarray, sigma: float) -> np.ndarray:
    """Brute-force tensor-product Gaussian blur, reflect boundary."""
    w = discrete_gaussian_stencil(sigma)
    radius = (len(w) - 1) // 2
    padded = np.pad(arr, radius, mode="symmetric")
    out = np.zeros_like(arr)
    for i, wi in enumerate(w):
        for j, wj in enumerate(w):
            out += wi * wj * padded[i : i + arr.shape[0], j : j + arr.shape[1]]
    return out


class TestGaussianFilter:
    def test_constant_preserved(self):
        out = gaussian_filter(np.full((6, 7), 3.25), sigma=1.2)
        np.testing.assert_allclose(out, 3.25, atol=1e-12)

    def test_impulse_reproduces_stencil(self):
        signal = np.zeros(9)
        signal[4] = 1.0
        out = gaussian_filter(signal, sigma=1.0, boundary="clamp")
        expected = np.zeros(9)
        expected[1:8] = discrete_gaussian_stencil(1.0)
        np.testing.assert_allclose(out, expected, atol=1e-15)

    def test_matches_dense_2d_convolution(self):
        rng = np.random.default_rng(42)
        arr = rng.normal(size=(17, 19))
        out = gaussian_filter(arr, sigma=1.3)
        np.testing.assert_allclose(out, dense_gaussian_2d(arr, 1.3), atol=1e-12)

    def test_3d_matches_offset_sum(self):
        rng = np.random.default_rng(3)
        arr = rng.normal(size=(5, 6, 7))
        sigma = 0.8
        w = discrete_gaussian_stencil(sigma)
        radius = (len(w) - 1) // 2
        padded = np.pad(arr, radius, mode="symmetric")
        expected = np.zeros_like(arr)
        for off in np.ndindex(len(w), len(w), len(w)):
            weight = w[off[0]] * w[off[1]] * w[off[2]]
            window = tuple(slice(o, o + d) for o, d in zip(off, arr.shape))
            expected += weight * padded[window]
        np.testing.assert_allclose(gaussian_filter(arr, sigma), expected, atol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(8, 8))
        b = rng.normal(size=(8, 8))
        lhs = gaussian_filter(2.0 * a - 3.0 * b, sigma=1.0)
        rhs = 2.0 * gaussian_filter(a, sigma=1.0) - 3.0 * gaussian_filter(b, sigma=1.0)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_range_bounds(self):
        rng = np.random.default_rng(11)
        arr = rng.uniform(-2.0, 5.0, size=(20, 20))
        out = gaussian_filter(arr, sigma=2.0)
        assert out.min() >= arr.min() - 1e-12
        assert out.max() <= arr.max() + 1e-12

    def test_volume_round_trip(self):
        vol = Volume(np.zeros((4, 4)), grid="cell")
        out = gaussian_filter(vol, sigma=1.0)
        assert isinstance(out, Volume)
        assert out.grid == "cell"

    def test_bad_boundary(self):
        with pytest.raises(ConfigError):
            gaussian_filter(np.zeros(5), sigma=1.0, boundary="mirror")


class TestIteratedGaussian:
    def test_single_iteration_matches_plain(self):
        rng = np.random.default_rng(5)
        arr = rng.normal(size=(9, 9))
        assert np.array_equal(iterated_gaussian(arr, 1.0, 1), gaussian_filter(arr, 1.0))

    def test_more_iterations_smooth_more(self):
        rng = np.random.default_rng(6)
        arr = rng.normal(size=(64, 64))
        once = iterated_gaussian(arr, 1.0, 1)
        thrice = iterated_gaussian(arr, 1.0, 3)
        assert np.var(thrice) < np.var(once) < np.var(arr)

    def test_constant_preserved(self):
        out = iterated_gaussian(np.full((5, 5), -1.5), 1.0, 3)
        np.testing.assert_allclose(out, -1.5, atol=1e-12)

    def test_rejects_zero_iterations(self):
        with pytest.raises(ConfigError):
            iterated_gaussian(np.zeros(4), 1.0, 0)


class TestBilateralFilter:
    def test_constant_preserved(self):
        out = bilateral_filter(np.full((6, 6), 0.7), sigma_spatial=1.0, sigma_range=0.1)
        np.testing.assert_allclose(out, 0.7, atol=1e-12)

    def test_wide_range_sigma_reduces_to_gaussian(self):
        rng = np.random.default_rng(12)
        arr = rng.uniform(0.0, 1.0, size=(12, 13))
        out = bilateral_filter(arr, sigma_spatial=1.0, sigma_range=1e6)
        np.testing.assert_allclose(out, gaussian_filter(arr, 1.0), atol=1e-9)

    def test_matches_bruteforce_window_sum(self):
        rng = np.random.default_rng(13)
        arr = rng.uniform(0.0, 1.0, size=(6, 7))
        sigma_s, sigma_r = 0.8, 0.3
        radius = 2  # max(floor(3 * 0.8), 1)
        expected = np.zeros_like(arr)
        for i in range(arr.shape[0]):
            for j in range(arr.shape[1]):
                num = den = 0.0
                for di in range(-radius, radius + 1):
                    for dj in range(-radius, radius + 1):
                        ii = min(max(i + di, 0), arr.shape[0] - 1)
                        jj = min(max(j + dj, 0), arr.shape[1] - 1)
                        w = np.exp(-(di * di + dj * dj) / (2 * sigma_s**2))
                        w *= np.exp(-((arr[ii, jj] - arr[i, j]) ** 2) / (2 * sigma_r**2))
                        num += w * arr[ii, jj]
                        den += w
                expected[i, j] = num / den
        out = bilateral_filter(arr, sigma_s, sigma_r, boundary="clamp")
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_preserves_step_edge(self):
        step = np.repeat([0.0, 1.0], 10)
        narrow = bilateral_filter(step, sigma_spatial=2.0, sigma_range=0.05)
        blurred = gaussian_filter(step, sigma=2.0)
        assert np.max(np.abs(narrow - step)) < 1e-3
        assert np.max(np.abs(blurred - step)) > 0.2

    def test_range_bounds(self):
        rng = np.random.default_rng(14)
        arr = rng.uniform(-1.0, 2.0, size=(15, 15))
        out = bilateral_filter(arr, 1.5, 0.5)
        assert out.min() >= arr.min() - 1e-12
        assert out.max() <= arr.max() + 1e-12

    def test_rejects_bad_sigmas(self):
        with pytest.raises(ConfigError):
            bilateral_filter(np.zeros((3, 3)), 0.0, 1.0)
        with pytest.raises(ConfigError):
            bilateral_filter(np.zeros((3, 3)), 1.0, -0.5)


class TestPointSampleReconstruction:
    def test_box_kernel_interpolates_at_nodes(self):
        rng = np.random.default_rng(21)
        n = 4
        samples = rng.normal(size=(n + 1, n + 1))
        nodes = np.arange(n + 1) / n
        out = kantorovich_point_sample(samples, n, make_box(), (nodes, nodes))
        np.testing.assert_allclose(out, samples, atol=1e-15)

    def test_constant_reproduced_away_from_faces(self):
        n = 8
        samples = np.ones((n + 1, n + 1))
        axes = (np.linspace(0.3, 0.7, 5), np.linspace(0.3, 0.7, 5))
        out = kantorovich_point_sample(samples, n, make_bspline3(), axes)
        np.testing.assert_allclose(out, 1.0, atol=1e-12)

    def test_matches_bruteforce_lattice_sum(self):
        rng = np.random.default_rng(22)
        n = 6
        kern = make_bspline3()
        samples = rng.normal(size=(n + 1, n + 1, n + 1))
        points = rng.uniform(0.0, 1.0, size=(10, 3))
        expected = np.zeros(10)
        for m, (x, y, z) in enumerate(points):
            acc = 0.0
            for k1 in range(n + 1):
                for k2 in range(n + 1):
                    for k3 in range(n + 1):
                        acc += samples[k1, k2, k3] * float(
                            kern(n * x - k1) * kern(n * y - k2) * kern(n * z - k3)
                        )
            expected[m] = acc
        out = kantorovich_point_sample(samples, n, kern, points)
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(23)
        n = 5
        a = rng.normal(size=(n + 1, n + 1))
        b = rng.normal(size=(n + 1, n + 1))
        pts = rng.uniform(0.0, 1.0, size=(7, 2))
        kern = make_bspline3()
        lhs = kantorovich_point_sample(3.0 * a - b, n, kern, pts)
        rhs = 3.0 * kantorovich_point_sample(a, n, kern, pts) - kantorovich_point_sample(b, n, kern, pts)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_scattered_1d_points(self):
        n = 4
        samples = np.arange(n + 1, dtype=float)
        out = kantorovich_point_sample(samples, n, make_box(), np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(out, [0.0, 2.0, 4.0], atol=1e-15)

    def test_rejects_wrong_lattice_shape(self):
        with pytest.raises(ValueError):
            kantorovich_point_sample(np.zeros((5, 6)), 4, make_box(), np.zeros((1, 2)))


class TestCellAverageReconstruction:
    def test_constant_everywhere(self):
        n = 8
        axes = ((np.arange(16) + 0.5) / 16,) * 2
        out = kantorovich_cell_average(lambda x, y: np.ones_like(x), n, make_bspline3(), axes)
        np.testing.assert_allclose(out, 1.0, atol=1e-12)

    def test_box_kernel_ramp_closed_form(self):
        rng = np.random.default_rng(31)
        n = 4
        pts = rng.uniform(0.0, 1.0, size=17)
        out = kantorovich_cell_average(lambda x: x, n, make_box(), pts)
        # box(n x - k) selects the single cell k = floor(n x + 1/2), whose
        # mean of the identity map is its midpoint (k + 1/2) / n
        expected = (np.floor(n * pts + 0.5) + 0.5) / n
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_volume_source_matches_callable_interior(self):
        n = 8
        f = lambda x, y: 2.0 * x - y

        def cell_mean(i, j):  # affine f: the mean over a cell is the centre value
            return 2.0 * (i + 0.5) / n - (j + 0.5) / n

        means = np.fromfunction(cell_mean, (n, n))
        axes = (np.linspace(0.3, 0.7, 6),) * 2
        from_volume = kantorovich_cell_average(Volume(means, grid="cell"), n, make_bspline3(), axes)
        from_callable = kantorovich_cell_average(f, n, make_bspline3(), axes)
        np.testing.assert_allclose(from_volume, from_callable, atol=1e-12)

    def test_error_decreases_with_rate(self):
        f = lambda x: np.sin(np.pi * x)
        xs = np.linspace(0.1, 0.9, 41)
        exact = f(xs)
        errors = [
            np.max(np.abs(kantorovich_cell_average(f, n, make_bspline3(), xs) - exact))
            for n in (4, 8, 16)
        ]
        assert errors[0] > errors[1] > errors[2]

    def test_volume_must_be_cell_grid(self):
        with pytest.raises(ValueError):
            kantorovich_cell_average(Volume(np.zeros((4, 4)), grid="node"), 4, make_box(), (np.array([0.5]),) * 2)

    def test_volume_dims_must_match_rate(self):
        with pytest.raises(ValueError):
            kantorovich_cell_average(Volume(np.zeros((5, 5)), grid="cell"), 4, make_box(), (np.array([0.5]),) * 2)

    def test_source_type_checked(self):
        with pytest.raises(TypeError):
            kantorovich_cell_average(3.0, 4, make_box(), np.array([0.5]))

    def test_cell_means_quadrature_exact_for_cubic(self):
        means = cell_means_from_function(lambda x: x**3, 4, [(0, 4)])
        # antiderivative x^4/4 over [k/4, (k+1)/4), divided by the width 1/4
        ks = np.arange(4)
        expected = (((ks + 1) / 4.0) ** 4 - (ks / 4.0) ** 4) / 4.0 * 4.0
        np.testing.assert_allclose(means, expected, atol=1e-15)


class TestBlockMean:
    def test_2x2_blocks(self):
        arr = np.array([[0.0, 1.0], [2.0, 3.0]])
        np.testing.assert_allclose(block_mean(arr, (2, 2)), [[1.5]])

    def test_1d_pairs(self):
        np.testing.assert_allclose(block_mean(np.arange(8.0), (2,)), [0.5, 2.5, 4.5, 6.5])

    def test_rejects_non_divisible(self):
        with pytest.raises(ValueError):
            block_mean(np.zeros((5, 4)), (2, 2))

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            block_mean(np.zeros((4, 4)), (2,))


class TestApplyOperator:
    def test_identity_copies(self):
        arr = np.arange(9.0).reshape(3, 3)
        out = apply_operator(arr, {"op": "identity"})
        assert np.array_equal(out, arr)
        assert out is not arr

    def test_gaussian_config(self):
        rng = np.random.default_rng(41)
        arr = rng.normal(size=(10, 10))
        out = apply_operator(arr, {"op": "gaussian", "sigma": 1.5})
        np.testing.assert_allclose(out, gaussian_filter(arr, 1.5), atol=0.0)

    def test_volume_in_volume_out(self):
        vol = Volume(np.ones((8, 8)), grid="cell")
        out = apply_operator(vol, {"op": "gaussian", "sigma": 1.0})
        assert isinstance(out, Volume)
        assert out.grid == "cell"

    def test_kantorovich_cell_constant(self):
        arr = np.full((16, 16), 2.5)
        out = apply_operator(arr, {"op": "kantorovich", "form": "cell", "n": 4})
        np.testing.assert_allclose(out, 2.5, atol=1e-12)

    def test_kantorovich_point_needs_matching_lattice(self):
        arr = np.zeros((17, 17))
        out = apply_operator(arr, {"op": "kantorovich", "form": "point", "n": 4})
        assert out.shape == (17, 17)
        with pytest.raises(ConfigError):
            apply_operator(np.zeros((16, 16)), {"op": "kantorovich", "form": "point", "n": 4})

    def test_kantorovich_cell_needs_divisible_dims(self):
        with pytest.raises(ConfigError):
            apply_operator(np.zeros((15, 15)), {"op": "kantorovich", "form": "cell", "n": 4})

    def test_wavelet_zero_threshold_is_identity(self):
        rng = np.random.default_rng(42)
        arr = rng.normal(size=(16, 16))
        out = apply_operator(arr, {"op": "wavelet", "family": "haar", "levels": 2, "lambda": 0.0})
        np.testing.assert_allclose(out, arr, atol=1e-10)

    def test_missing_op_key(self):
        with pytest.raises(ConfigError):
            apply_operator(np.zeros(4), {"sigma": 1.0})

    def test_unknown_op(self):
        with pytest.raises(ConfigError):
            apply_operator(np.zeros(4), {"op": "median"})

    def test_missing_required_field(self):
        with pytest.raises(ConfigError):
            apply_operator(np.zeros(4), {"op": "gaussian"})

    def test_bilateral_config(self):
        rng = np.random.default_rng(43)
        arr = rng.uniform(size=(8, 8))
        out = apply_operator(arr, {"op": "bilateral", "sigma_spatial": 1.0, "sigma_range": 0.2})
        np.testing.assert_allclose(out, bilateral_filter(arr, 1.0, 0.2), atol=0.0)


class TestPointwiseError:
    def test_hand_values(self):
        out = pointwise_error(np.array([1.0, 2.0]), np.array([0.0, 4.0]))
        np.testing.assert_array_equal(out, [1.0, 2.0])

    def test_max_matches_sup_distance(self):
        rng = np.random.default_rng(51)
        a = rng.normal(size=(6, 6))
        b = rng.normal(size=(6, 6))
        assert pointwise_error(a, b).max() == pytest.approx(lp_distance(a, b, np.inf))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            pointwise_error(np.zeros(3), np.zeros(4))
