"""Periodized orthonormal wavelet transforms and coefficient shrinkage.

The transform is the classical pyramid: one level splits every axis into a
lowpass and a highpass half with periodic (circular) indexing, yielding
2^d - 1 detail subbands per level plus one approximation that feeds the next
level.  Subbands are labelled by one character per axis, ``L`` or ``H``, in
axis order, so the all-highpass (diagonal) subband of a 3-D level is ``HHH``.
Because the filter pairs are orthonormal quadrature mirrors and the indexing
is periodic, the full coefficient set conserves energy exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

_SQRT2 = np.sqrt(2.0)
_SQRT3 = np.sqrt(3.0)

FILTER_BANKS = {
    "haar": np.array([1.0, 1.0]) / _SQRT2,
    "db4": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]) / (4.0 * _SQRT2),
}

# Robust noise-scale calibration: median(|X|) for X ~ N(0, 1).
MEDIAN_TO_SIGMA = 0.6745


def lowpass(family: str) -> np.ndarray:
    try:
        return FILTER_BANKS[family]
    except KeyError:
        raise ValueError(f"unknown wavelet family {family!r}") from None


def highpass(family: str) -> np.ndarray:
    """Quadrature mirror of the lowpass filter: g[m] = (-1)^m h[L-1-m]."""
    h = lowpass(family)
    signs = (-1.0) ** np.arange(len(h))
    return signs * h[::-1]


@dataclass
class WaveletDecomposition:
    """Multilevel coefficients: approximation plus (level, label) -> details.

    Level 1 is the finest scale; labels have one ``L``/``H`` per axis.
    """

    family: str
    levels: int
    approx: np.ndarray
    details: dict[tuple[int, str], np.ndarray]

    def detail_labels(self) -> list[str]:
        ndim = self.approx.ndim
        return ["".join(c) for c in product("LH", repeat=ndim) if set(c) != {"L"}]

    def coefficient_count(self) -> int:
        return self.approx.size + sum(d.size for d in self.details.values())


def _analyze_axis(arr: np.ndarray, filt: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(arr, axis, 0)
    m = moved.shape[0]
    idx = (2 * np.arange(m // 2)[:, None] + np.arange(len(filt))[None, :]) % m
    gathered = moved[idx]  # (m/2, taps, ...)
    out = np.tensordot(gathered, filt, axes=(1, 0))
    return np.moveaxis(out, 0, axis)


def _synthesize_axis(low: np.ndarray, high: np.ndarray, family: str, axis: int) -> np.ndarray:
    h = lowpass(family)
    g = highpass(family)
    lo = np.moveaxis(low, axis, 0)
    hi = np.moveaxis(high, axis, 0)
    half = lo.shape[0]
    m = 2 * half
    idx = (2 * np.arange(half)[:, None] + np.arange(len(h))[None, :]) % m
    contrib = h.reshape((1, len(h)) + (1,) * (lo.ndim - 1)) * lo[:, None] + g.reshape(
        (1, len(g)) + (1,) * (hi.ndim - 1)
    ) * hi[:, None]
    out = np.zeros((m,) + lo.shape[1:])
    np.add.at(out, idx, contrib)
    return np.moveaxis(out, 0, axis)


def dwt(arr: np.ndarray, family: str = "haar", levels: int = 1) -> WaveletDecomposition:
    """Multilevel periodic analysis; every axis length must be divisible by 2**levels."""
    arr = np.asarray(arr, dtype=np.float64)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    for dim in arr.shape:
        if dim % 2**levels:
            raise ValueError(f"axis length {dim} not divisible by 2**{levels}")
    h = lowpass(family)
    g = highpass(family)
    details: dict[tuple[int, str], np.ndarray] = {}
    current = arr
    all_low = "L" * arr.ndim
    for level in range(1, levels + 1):
        bands = {"": current}
        for axis in range(arr.ndim):
            split: dict[str, np.ndarray] = {}
            for label, block in bands.items():
                split[label + "L"] = _analyze_axis(block, h, axis)
                split[label + "H"] = _analyze_axis(block, g, axis)
            bands = split
        for label, block in bands.items():
            if label != all_low:
                details[(level, label)] = block
        current = bands[all_low]
    return WaveletDecomposition(family=family, levels=levels, approx=current, details=details)


def idwt(decomp: WaveletDecomposition) -> np.ndarray:
    """Exact inverse of :func:`dwt` (the synthesis bank is the transpose)."""
    current = decomp.approx
    ndim = current.ndim
    all_low = "L" * ndim
    for level in range(decomp.levels, 0, -1):
        bands = {all_low: current}
        for label in decomp.detail_labels():
            bands[label] = decomp.details[(level, label)]
        for axis in range(ndim - 1, -1, -1):
            merged: dict[str, np.ndarray] = {}
            for label in {key[:-1] for key in bands}:
                merged[label] = _synthesize_axis(
                    bands[label + "L"], bands[label + "H"], decomp.family, axis
                )
            bands = merged
        current = bands[""]
    return current


def hard_threshold(coeffs: np.ndarray, lam: float) -> np.ndarray:
    """Keep coefficients with |w| > lam, zero the rest."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return np.where(np.abs(coeffs) > lam, coeffs, 0.0)


def soft_threshold(coeffs: np.ndarray, lam: float) -> np.ndarray:
    """Shrink magnitudes toward zero by lam: sgn(w) * max(|w| - lam, 0)."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return np.sign(coeffs) * np.maximum(np.abs(coeffs) - lam, 0.0)


def threshold_details(
    decomp: WaveletDecomposition, lam: float, mode: str = "hard"
) -> WaveletDecomposition:
    """Threshold every detail subband; the approximation passes through."""
    if mode == "hard":
        fn = hard_threshold
    elif mode == "soft":
        fn = soft_threshold
    else:
        raise ValueError(f"unknown threshold mode {mode!r}")
    if lam < 0:
        raise ValueError("threshold must be >= 0")
    new_details = {key: fn(block, lam) for key, block in decomp.details.items()}
    return WaveletDecomposition(
        family=decomp.family,
        levels=decomp.levels,
        approx=decomp.approx.copy(),
        details=new_details,
    )


def universal_threshold(decomp: WaveletDecomposition, total_count: int) -> float:
    """Noise-adaptive threshold sigma_hat * sqrt(2 ln N).

    sigma_hat is the median absolute coefficient of the finest diagonal
    (all-highpass) subband divided by 0.6745; N is the total sample count.
    """
    diagonal = decomp.details[(1, "H" * decomp.approx.ndim)]
    sigma_hat = float(np.median(np.abs(diagonal))) / MEDIAN_TO_SIGMA
    return sigma_hat * np.sqrt(2.0 * np.log(total_count))


def denoise(
    arr: np.ndarray,
    family: str = "haar",
    levels: int = 2,
    mode: str = "hard",
    threshold: float | str = "universal",
) -> np.ndarray:
    """Decompose, threshold the details, reconstruct."""
    arr = np.asarray(arr, dtype=np.float64)
    decomp = dwt(arr, family=family, levels=levels)
    if isinstance(threshold, str):
        if threshold != "universal":
            raise ValueError(f"unknown threshold rule {threshold!r}")
        lam = universal_threshold(decomp, arr.size)
    else:
        lam = float(threshold)
    return idwt(threshold_details(decomp, lam, mode))


def default_levels(shape: tuple[int, ...], cap: int = 2) -> int:
    """Largest level count (at most ``cap``) dividing every axis length."""
    levels = 0
    while levels < cap and all(dim % 2 ** (levels + 1) == 0 and dim // 2 ** (levels + 1) >= 1 for dim in shape):
        levels += 1
    if levels == 0:
        raise ValueError(f"no axis-divisible decomposition level for shape {shape}")
    return levels


def jackson_decay_check(
    f,
    resolutions: list[int] | tuple[int, ...] = (1, 2, 3, 4),
    family: str = "haar",
    size: int = 512,
) -> np.ndarray:
    """RMS error of the dyadic scaling-space approximation of a 1-D function.

    ``f`` is sampled on ``size`` nodes of [0, 1]; for each exponent ``j`` the
    samples are decomposed until only 2**j approximation coefficients remain,
    all details are dropped, and the reconstruction error is measured.  For
    smooth signals the errors halve when ``j`` increases by one (first-order
    scaling-space approximation).
    """
    depth_total = int(np.log2(size))
    if 2**depth_total != size:
        raise ValueError(f"size {size} is not a power of two")
    xs = np.arange(size) / (size - 1)
    samples = np.asarray(f(xs), dtype=np.float64)
    errors = []
    for j in resolutions:
        levels = depth_total - int(j)
        if levels < 1:
            raise ValueError(f"resolution 2**{j} needs at least one analysis level")
        decomp = dwt(samples, family=family, levels=levels)
        decomp = threshold_details(decomp, np.inf, mode="hard")
        recon = idwt(decomp)
        errors.append(float(np.sqrt(np.mean((samples - recon) ** 2))))
    return np.asarray(errors)
