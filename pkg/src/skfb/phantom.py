"""Analytic head phantom, bicubic resampling, and the ROI catalogue."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Roi, Volume


@dataclass(frozen=True)
class Ellipse:
    """Semi-axes, centre, tilt (radians, counterclockwise), additive intensity."""

    semi_a: float
    semi_b: float
    x0: float
    y0: float
    theta: float
    intensity: float

    def __post_init__(self) -> None:
        if self.semi_a <= 0 or self.semi_b <= 0:
            raise ValueError("semi-axes must be positive")

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        dx = x - self.x0
        dy = y - self.y0
        u = dx * np.cos(self.theta) + dy * np.sin(self.theta)
        v = -dx * np.sin(self.theta) + dy * np.cos(self.theta)
        return (u / self.semi_a) ** 2 + (v / self.semi_b) ** 2 <= 1.0


# Ten-ellipse head phantom: (semi_a, semi_b, x0, y0, tilt in degrees).  The
# "modified" variant uses the low-contrast display intensities; "standard"
# keeps the original attenuation-style values.
_GEOMETRY = [
    (0.69, 0.92, 0.0, 0.0, 0.0),
    (0.6624, 0.874, 0.0, -0.0184, 0.0),
    (0.11, 0.31, 0.22, 0.0, -18.0),
    (0.16, 0.41, -0.22, 0.0, 18.0),
    (0.21, 0.25, 0.0, 0.35, 0.0),
    (0.046, 0.046, 0.0, 0.1, 0.0),
    (0.046, 0.046, 0.0, -0.1, 0.0),
    (0.046, 0.023, -0.08, -0.605, 0.0),
    (0.023, 0.023, 0.0, -0.606, 0.0),
    (0.023, 0.046, 0.06, -0.605, 0.0),
]

_MODIFIED_INTENSITIES = [1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]
_STANDARD_INTENSITIES = [1.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01]


def ellipse_table(variant: str = "modified") -> list[Ellipse]:
    if variant == "modified":
        intensities = _MODIFIED_INTENSITIES
    elif variant == "standard":
        intensities = _STANDARD_INTENSITIES
    else:
        raise ValueError(f"unknown phantom variant {variant!r}")
    return [
        Ellipse(a, b, x0, y0, float(np.deg2rad(deg)), intensity)
        for (a, b, x0, y0, deg), intensity in zip(_GEOMETRY, intensities)
    ]


def pixel_grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    """Pixel-centre coordinates: x along columns, y along rows (row 0 on top)."""
    cols = 2.0 * (np.arange(size) + 0.5) / size - 1.0
    rows = 1.0 - 2.0 * (np.arange(size) + 0.5) / size
    return cols[None, :], rows[:, None]


def shepp_logan_2d(size: int, variant: str = "modified", clip: bool = True) -> np.ndarray:
    """Rasterize the head phantom on a size x size pixel grid.

    Pixel (r, c) is sampled at its centre, x = 2(c+0.5)/size - 1 and
    y = 1 - 2(r+0.5)/size, so row 0 is the top of the head.  Ellipse
    intensities are additive; with ``clip`` the result is clamped to [0, 1].
    """
    if size < 8:
        raise ValueError("size must be at least 8")
    x, y = pixel_grid(size)
    img = np.zeros((size, size))
    for e in ellipse_table(variant):
        img += np.where(e.contains(x, y), e.intensity, 0.0)
    if clip:
        img = np.clip(img, 0.0, 1.0)
    return img


def _cubic_weight(t: np.ndarray) -> np.ndarray:
    # Catmull-Rom taps (sharpness a = -1/2).
    at = np.abs(t)
    inner = 1.5 * at**3 - 2.5 * at**2 + 1.0
    outer = -0.5 * at**3 + 2.5 * at**2 - 4.0 * at + 2.0
    return np.where(at <= 1.0, inner, np.where(at < 2.0, outer, 0.0))


def _resize_matrix(out_len: int, in_len: int) -> np.ndarray:
    """Row-stochastic interpolation matrix for one axis, clamp-to-edge taps."""
    scale = in_len / out_len
    src = (np.arange(out_len) + 0.5) * scale - 0.5
    base = np.floor(src).astype(int)
    mat = np.zeros((out_len, in_len))
    for tap in range(-1, 3):
        idx = np.clip(base + tap, 0, in_len - 1)
        w = _cubic_weight(src - (base + tap))
        np.add.at(mat, (np.arange(out_len), idx), w)
    return mat


def resize_bicubic(img: np.ndarray, out_shape: tuple[int, int]) -> np.ndarray:
    """Separable Catmull-Rom resampling with centre-aligned pixel mapping."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    if min(img.shape) < 4:
        raise ValueError("source must be at least 4x4")
    out_h, out_w = out_shape
    if out_h < 2 or out_w < 2:
        raise ValueError("target must be at least 2 per axis")
    row_mat = _resize_matrix(out_h, img.shape[0])
    col_mat = _resize_matrix(out_w, img.shape[1])
    return row_mat @ img @ col_mat.T


def stack_volume(slice2d: np.ndarray, depth: int) -> Volume:
    """Stack ``depth`` copies of a slice into a (depth, H, W) cell-grid volume."""
    slice2d = np.asarray(slice2d, dtype=np.float64)
    if slice2d.ndim != 2 or depth < 1:
        raise ValueError("need a 2-D slice and depth >= 1")
    return Volume(np.repeat(slice2d[None, :, :], depth, axis=0), grid="cell")


def roi_catalog() -> list[Roi]:
    """The six named 20x20 analysis windows on the 128x128 slice, in report
    order; bounds are (row, col) half-open index pairs."""
    windows = [
        ("White Matter", ((50, 70), (50, 70))),
        ("Tumor", ((30, 50), (80, 100))),
        ("CSF", ((10, 30), (10, 30))),
        ("Liver Parenchyma", ((70, 90), (30, 50))),
        ("Kidney Edge", ((80, 100), (90, 110))),
        ("Aorta", ((40, 60), (10, 30))),
    ]
    return [Roi(bounds=bounds, name=name) for name, bounds in windows]
