"""Smoothing and reconstruction operators on sampled volumes.

All operators act on float64 arrays (or :class:`~skfb.core.Volume` wrappers,
which they return unchanged in kind).  Spatial scales are in grid units for
the discrete filters and in lattice units ``1/n`` for the Kantorovich
operators, which reconstruct a function on [0, 1]^d from lattice data:

* point form: weights the lattice samples ``f(k/n)`` themselves;
* cell-average form: weights the mean of ``f`` over the cell
  ``[k/n, (k+1)/n)^d``, which is the right choice when only local averages
  of the signal are trustworthy.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .core import DEFAULT_BOUNDARY, PAD_MODES, Volume, pad_array
from .kernels import Kernel, discrete_gaussian_stencil, kernel_by_name


class ConfigError(ValueError):
    """An operator configuration that cannot be executed as given."""


def _unwrap(data: np.ndarray | Volume) -> tuple[np.ndarray, Callable[[np.ndarray], np.ndarray | Volume]]:
    if isinstance(data, Volume):
        return data.data, lambda out: Volume(out, grid=data.grid)
    return np.asarray(data, dtype=np.float64), lambda out: out


def _filter_axis(arr: np.ndarray, weights: np.ndarray, axis: int, boundary: str) -> np.ndarray:
    radius = (len(weights) - 1) // 2
    moved = np.moveaxis(arr, axis, 0)
    widths = [(radius, radius)] + [(0, 0)] * (moved.ndim - 1)
    padded = np.pad(moved, widths, mode=PAD_MODES[boundary])
    out = np.zeros_like(moved)
    for i, w in enumerate(weights):
        out += w * padded[i : i + moved.shape[0]]
    return np.moveaxis(out, 0, axis)


def gaussian_filter(
    data: np.ndarray | Volume,
    sigma: float,
    boundary: str = DEFAULT_BOUNDARY,
) -> np.ndarray | Volume:
    """Separable discrete Gaussian blur with standard deviation ``sigma`` grid units."""
    if boundary not in PAD_MODES:
        raise ConfigError(f"unknown boundary policy {boundary!r}")
    arr, rewrap = _unwrap(data)
    weights = discrete_gaussian_stencil(sigma)
    out = arr
    for axis in range(arr.ndim):
        out = _filter_axis(out, weights, axis, boundary)
    return rewrap(out)


def iterated_gaussian(
    data: np.ndarray | Volume,
    sigma: float,
    iterations: int,
    boundary: str = DEFAULT_BOUNDARY,
) -> np.ndarray | Volume:
    """Apply the Gaussian blur ``iterations`` times in a row."""
    if iterations < 1:
        raise ConfigError("iterations must be >= 1")
    out: np.ndarray | Volume = data
    for _ in range(iterations):
        out = gaussian_filter(out, sigma, boundary)
    return out


def bilateral_filter(
    data: np.ndarray | Volume,
    sigma_spatial: float,
    sigma_range: float,
    boundary: str = DEFAULT_BOUNDARY,
) -> np.ndarray | Volume:
    """Edge-preserving bilateral filter over the full (2K+1)^d window.

    ``K = max(floor(3 * sigma_spatial), 1)``.  Each output value is the
    window average of the input weighted by a spatial Gaussian in the index
    offset and a range Gaussian in the value difference, renormalized by the
    total weight; the filter is deliberately not separable.
    """
    if sigma_spatial <= 0 or sigma_range <= 0:
        raise ConfigError("bilateral sigmas must be positive")
    if boundary not in PAD_MODES:
        raise ConfigError(f"unknown boundary policy {boundary!r}")
    arr, rewrap = _unwrap(data)
    radius = max(int(np.floor(3.0 * sigma_spatial)), 1)
    padded = pad_array(arr, radius, boundary)
    inv2s = 1.0 / (2.0 * sigma_spatial**2)
    inv2r = 1.0 / (2.0 * sigma_range**2)
    numer = np.zeros_like(arr)
    denom = np.zeros_like(arr)
    for offset in np.ndindex(*([2 * radius + 1] * arr.ndim)):
        k = np.asarray(offset) - radius
        w_spatial = np.exp(-float(k @ k) * inv2s)
        window = tuple(slice(o, o + dim) for o, dim in zip(offset, arr.shape))
        shifted = padded[window]
        diff = shifted - arr
        w = w_spatial * np.exp(-(diff**2) * inv2r)
        numer += w * shifted
        denom += w
    return rewrap(numer / denom)


def pointwise_error(approx: np.ndarray | Volume, reference: np.ndarray | Volume) -> np.ndarray:
    """Elementwise absolute deviation |approx - reference|."""
    a = approx.data if isinstance(approx, Volume) else np.asarray(approx, dtype=np.float64)
    b = reference.data if isinstance(reference, Volume) else np.asarray(reference, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return np.abs(a - b)


# ---------------------------------------------------------------------------
# Kantorovich sampling operators
# ---------------------------------------------------------------------------


def _axis_weight_matrix(kernel: Kernel, n: int, coords: np.ndarray, k_start: int, count: int) -> np.ndarray:
    """Matrix W[m, i] = kernel(n * coords[m] - (k_start + i))."""
    ks = k_start + np.arange(count)
    return kernel(n * coords[:, None] - ks[None, :])


def _separable_eval(
    coeffs: np.ndarray,
    n: int,
    kernel: Kernel,
    axes: Sequence[np.ndarray],
    k_starts: Sequence[int],
) -> np.ndarray:
    """Evaluate sum_k prod_j kernel(n x_j - k_j) * coeffs[k] on a tensor grid."""
    out = coeffs
    for axis, coords in enumerate(axes):
        mat = _axis_weight_matrix(kernel, n, np.asarray(coords, dtype=np.float64), k_starts[axis], out.shape[axis])
        out = np.moveaxis(np.tensordot(mat, np.moveaxis(out, axis, 0), axes=(1, 0)), 0, axis)
    return out


def _scattered_eval(
    coeffs: np.ndarray,
    n: int,
    kernel: Kernel,
    points: np.ndarray,
    k_starts: Sequence[int],
) -> np.ndarray:
    """Same sum as :func:`_separable_eval` at arbitrary points, one at a time."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None] if coeffs.ndim == 1 else pts[None, :]
    if pts.shape[1] != coeffs.ndim:
        raise ValueError(f"points have {pts.shape[1]} coordinates, lattice is {coeffs.ndim}-dimensional")
    out = np.empty(pts.shape[0])
    for m, point in enumerate(pts):
        block = coeffs
        for axis, x in enumerate(point):
            ks = k_starts[axis] + np.arange(coeffs.shape[axis])
            weights = kernel(n * x - ks)
            block = np.tensordot(weights, block, axes=(0, 0))
        out[m] = block
    return out


def _eval_dispatch(coeffs, n, kernel, points, k_starts):
    if isinstance(points, (tuple, list)):
        if len(points) != coeffs.ndim:
            raise ValueError(f"{len(points)} coordinate axes for a {coeffs.ndim}-dimensional lattice")
        return _separable_eval(coeffs, n, kernel, points, k_starts)
    return _scattered_eval(coeffs, n, kernel, points, k_starts)


def kantorovich_point_sample(
    samples: np.ndarray,
    n: int,
    kernel: Kernel,
    points: np.ndarray | Sequence[np.ndarray],
) -> np.ndarray:
    """Reconstruct from node samples: sum over the lattice k in {0..n}^d of
    ``samples[k] * prod_j kernel(n x_j - k_j)``.

    ``samples`` must have shape (n+1,)^d, holding ``f(k/n)``.  ``points`` is
    either an (m, d) array of scattered points or a tuple of per-axis
    coordinate vectors for tensor-grid evaluation.  The sum is the finite
    lattice sum, so partition of unity (hence constant reproduction) holds
    only at points further than ``kernel.support / n`` from the cube faces.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if any(s != n + 1 for s in samples.shape):
        raise ValueError(f"samples must be ({n + 1},)^d, got {samples.shape}")
    return _eval_dispatch(samples, n, kernel, points, [0] * samples.ndim)


def cell_means_from_function(
    f: Callable[..., np.ndarray],
    n: int,
    k_ranges: Sequence[tuple[int, int]],
    quad_order: int = 4,
) -> np.ndarray:
    """Mean of ``f`` over each cell [k/n, (k+1)/n)^d for k in the given ranges.

    Gauss-Legendre of ``quad_order`` points per axis, exact for polynomials
    of degree 2*quad_order-1 and effectively exact for the smooth fields
    used here.
    """
    nodes, weights = leggauss(quad_order)  # on [-1, 1], weights sum to 2
    half = 0.5 / n
    axes_pts = []
    axes_wts = []
    for lo, hi in k_ranges:
        centers = (np.arange(lo, hi) + 0.5) / n
        pts = centers[:, None] + half * nodes[None, :]  # (cells, quad)
        axes_pts.append(pts.ravel())
        axes_wts.append(np.tile(weights / 2.0, hi - lo))  # mean, not integral
    mesh = np.meshgrid(*axes_pts, indexing="ij")
    values = np.asarray(f(*mesh), dtype=np.float64)
    wmesh = np.meshgrid(*axes_wts, indexing="ij")
    for w in wmesh:
        values = values * w
    d = len(k_ranges)
    shape = []
    for lo, hi in k_ranges:
        shape.extend([hi - lo, quad_order])
    values = values.reshape(shape)
    values = values.sum(axis=tuple(2 * i + 1 for i in range(d)))
    return values


def kantorovich_cell_average(
    source: Callable[..., np.ndarray] | Volume,
    n: int,
    kernel: Kernel,
    points: np.ndarray | Sequence[np.ndarray],
    boundary: str = DEFAULT_BOUNDARY,
) -> np.ndarray:
    """Reconstruct from cell averages: sum over cells k of
    ``mean(f over [k/n,(k+1)/n)^d) * prod_j kernel(n x_j - k_j)``.

    ``source`` is either a callable (cell means are computed by quadrature
    over every cell the kernel window touches) or a cell-grid Volume with
    shape (n,)^d whose values ARE the cell means; in the Volume case cells
    outside the grid are filled by the boundary policy.
    """
    if isinstance(points, (tuple, list)):
        axes = [np.asarray(p, dtype=np.float64) for p in points]
    else:
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            # A flat array is m points on a 1-D domain, unless the source
            # volume says the domain has more axes (then it is one point).
            d = source.ndim if isinstance(source, Volume) else 1
            pts = pts[:, None] if d == 1 else pts[None, :]
        axes = [pts[:, j] for j in range(pts.shape[1])]
    margin = int(np.ceil(kernel.window))
    k_ranges = [
        (int(np.floor(n * ax.min())) - margin, int(np.ceil(n * ax.max())) + margin + 1)
        for ax in axes
    ]

    if isinstance(source, Volume):
        if source.grid != "cell":
            raise ValueError("cell-average reconstruction from a Volume needs a cell grid")
        if any(s != n for s in source.dims):
            raise ValueError(f"cell-mean volume must be ({n},)^d, got {source.dims}")
        if boundary not in PAD_MODES:
            raise ConfigError(f"unknown boundary policy {boundary!r}")
        # Pad so the coefficient block covers [min(lo, 0), max(hi, n)) on each
        # axis; surplus cells sit outside every kernel window and weigh zero.
        widths = [(max(0, -lo), max(0, hi - n)) for lo, hi in k_ranges]
        coeffs = np.pad(source.data, widths, mode=PAD_MODES[boundary])
        k_starts = [min(lo, 0) for lo, _ in k_ranges]
    elif callable(source):
        coeffs = cell_means_from_function(source, n, k_ranges)
        k_starts = [lo for lo, _ in k_ranges]
    else:
        raise TypeError("source must be a callable or a cell-grid Volume")

    return _eval_dispatch(coeffs, n, kernel, points, k_starts)


# ---------------------------------------------------------------------------
# Config-dict dispatch (the JSON operator configs used by the CLI and tables)
# ---------------------------------------------------------------------------


def block_mean(arr: np.ndarray, factors: Sequence[int]) -> np.ndarray:
    """Downsample by averaging non-overlapping blocks of the given factors."""
    if len(factors) != arr.ndim:
        raise ValueError("one block factor per axis required")
    shape = []
    for dim, f in zip(arr.shape, factors):
        if dim % f:
            raise ValueError(f"axis length {dim} not divisible by block factor {f}")
        shape.extend([dim // f, f])
    out = arr.reshape(shape)
    return out.mean(axis=tuple(2 * i + 1 for i in range(arr.ndim)))


def _apply_kantorovich_config(arr: np.ndarray, config: dict) -> np.ndarray:
    n = int(config.get("n", 32))
    kernel = kernel_by_name(config.get("kernel", "bspline3"))
    form = config.get("form", "cell")
    boundary = config.get("boundary", DEFAULT_BOUNDARY)
    if n < 1:
        raise ConfigError("kantorovich n must be >= 1")
    if form == "cell":
        for dim in arr.shape:
            if dim % n:
                raise ConfigError(f"cell form needs axis lengths divisible by n={n}, got {arr.shape}")
        means = block_mean(arr, [dim // n for dim in arr.shape])
        vol = Volume(means, grid="cell")
        axes = [(np.arange(dim) + 0.5) / dim for dim in arr.shape]
        out = kantorovich_cell_average(vol, n, kernel, axes, boundary)
    elif form == "point":
        for dim in arr.shape:
            if (dim - 1) % n:
                raise ConfigError(f"point form needs (axis length - 1) divisible by n={n}, got {arr.shape}")
        strides = tuple(slice(None, None, (dim - 1) // n) for dim in arr.shape)
        samples = arr[strides]
        axes = [np.arange(dim) / (dim - 1) for dim in arr.shape]
        out = kantorovich_point_sample(samples, n, kernel, axes)
    else:
        raise ConfigError(f"unknown kantorovich form {form!r}")
    return out


def apply_operator(data: np.ndarray | Volume, config: dict) -> np.ndarray | Volume:
    """Apply an operator described by a JSON-style config dict.

    Recognized ``op`` values: ``gaussian``, ``iterated_gaussian``,
    ``bilateral``, ``kantorovich``, ``wavelet``, ``identity``.
    """
    if not isinstance(config, dict) or "op" not in config:
        raise ConfigError("operator config must be a dict with an 'op' key")
    arr, rewrap = _unwrap(data)
    op = config["op"]
    try:
        if op == "identity":
            out = arr.copy()
        elif op == "gaussian":
            out = gaussian_filter(arr, float(config["sigma"]), config.get("boundary", DEFAULT_BOUNDARY))
        elif op == "iterated_gaussian":
            out = iterated_gaussian(
                arr,
                float(config["sigma"]),
                int(config.get("iterations", 3)),
                config.get("boundary", DEFAULT_BOUNDARY),
            )
        elif op == "bilateral":
            out = bilateral_filter(
                arr,
                float(config["sigma_spatial"]),
                float(config["sigma_range"]),
                config.get("boundary", DEFAULT_BOUNDARY),
            )
        elif op == "kantorovich":
            out = _apply_kantorovich_config(arr, config)
        elif op == "wavelet":
            from . import wavelet

            lam = config.get("lambda", "universal")
            out = wavelet.denoise(
                arr,
                family=config.get("family", "haar"),
                levels=int(config.get("levels", 2)),
                mode=config.get("mode", "hard"),
                threshold=lam if lam == "universal" else float(lam),
            )
        else:
            raise ConfigError(f"unknown operator {op!r}")
    except KeyError as exc:
        raise ConfigError(f"operator {op!r} is missing required field {exc}") from exc
    return rewrap(out)
