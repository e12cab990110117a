"""Fidelity and speckle statistics for filtered regions.

All statistics use the population convention (``ddof=0``).  Ratio metrics
that would divide by a vanishing denominator raise a typed error rather
than returning garbage; genuinely infinite values (PSNR of an exact match,
ENL of a perfectly flat region) are returned as ``inf`` and rendered as the
string ``"inf"`` by :func:`format_value`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Roi, extract_roi

MEAN_EPS = 1e-12


class ZeroMeanRegionError(ValueError):
    """A mean-normalized statistic was requested on a region with mean ~ 0."""


class ZeroSIOriginalError(ValueError):
    """Speckle suppression is undefined when the original region has SI = 0."""


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared error between two equal-shape arrays.

    Parameters
    ----------
    a, b : ndarray
        Arrays to compare.

    Returns
    -------
    float
        Mean over all samples of the squared difference.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio, ``10 log10(peak^2 / mse)``, in dB.

    Returns ``inf`` when the arrays agree exactly.
    """
    err = mse(a, b)
    if err == 0.0:
        return float("inf")
    return float(10.0 * np.log10(peak**2 / err))


def si(region: np.ndarray) -> float:
    """Speckle index: population standard deviation over mean.

    Raises
    ------
    ZeroMeanRegionError
        If the region mean is smaller than ``MEAN_EPS`` in magnitude.
    """
    region = np.asarray(region, dtype=np.float64)
    mean = float(region.mean())
    if abs(mean) < MEAN_EPS:
        raise ZeroMeanRegionError(f"region mean {mean:g} too close to zero")
    return float(region.std() / mean)


def ssi(original: np.ndarray, filtered: np.ndarray) -> float:
    """Speckle suppression index: SI of the filtered region over SI of the
    original region.  Values below 1 mean the filter reduced relative
    fluctuation; 1 means it left the region statistics alone.

    Raises
    ------
    ZeroSIOriginalError
        If the original region has zero speckle index.
    """
    si_orig = si(original)
    if si_orig == 0.0:
        raise ZeroSIOriginalError("original region is perfectly flat")
    return si(filtered) / si_orig


def smpi(original: np.ndarray, filtered: np.ndarray) -> float:
    """Speckle mean preservation index: filtered mean over original mean."""
    filtered = np.asarray(filtered, dtype=np.float64)
    original = np.asarray(original, dtype=np.float64)
    mean_orig = float(original.mean())
    if abs(mean_orig) < MEAN_EPS:
        raise ZeroMeanRegionError(f"original region mean {mean_orig:g} too close to zero")
    return float(filtered.mean()) / mean_orig


def enl(region: np.ndarray) -> float:
    """Equivalent number of looks, ``mean^2 / var`` (= ``1 / SI^2``).

    Returns ``inf`` for a perfectly flat region.
    """
    region = np.asarray(region, dtype=np.float64)
    mean = float(region.mean())
    if abs(mean) < MEAN_EPS:
        raise ZeroMeanRegionError(f"region mean {mean:g} too close to zero")
    var = float(region.var())
    if var == 0.0:
        return float("inf")
    return mean**2 / var


@dataclass(frozen=True)
class MetricsReport:
    """The six per-region statistics for one (ROI, operator) pair.

    ``si`` and ``enl`` describe the filtered region; ``ssi``, ``smpi``,
    ``mse`` and ``psnr`` compare it against the original region.
    """

    roi_name: str
    operator_config: str
    si: float
    ssi: float
    smpi: float
    enl: float
    mse: float
    psnr: float

    def values(self) -> dict[str, float]:
        return {
            "si": self.si,
            "ssi": self.ssi,
            "smpi": self.smpi,
            "enl": self.enl,
            "mse": self.mse,
            "psnr": self.psnr,
        }


def report(
    original_slice: np.ndarray,
    filtered_slice: np.ndarray,
    roi: Roi,
    peak: float = 1.0,
    config: str = "",
) -> MetricsReport:
    """All six statistics on one ROI window of an original/filtered pair."""
    orig = extract_roi(original_slice, roi)
    filt = extract_roi(filtered_slice, roi)
    return MetricsReport(
        roi_name=roi.name,
        operator_config=config,
        si=si(filt),
        ssi=ssi(orig, filt),
        smpi=smpi(orig, filt),
        enl=enl(filt),
        mse=mse(filt, orig),
        psnr=psnr(filt, orig, peak=peak),
    )


def format_value(x: float, digits: int = 6) -> str:
    """Render a metric with ``digits`` significant digits; infinities as ``inf``."""
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"
