"""One-dimensional reconstruction kernels and their admissibility checks.

A kernel here is an even, bounded function with a finite window radius.
Multidimensional kernels are always tensor products of these, so only the
1-D profiles live in this module, together with the three admissibility
checks used throughout: partition of unity over integer shifts, global
boundedness, and polynomial decay.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Kernel:
    """A 1-D kernel profile.

    ``support`` is the true support radius (``inf`` for the Gaussian);
    ``window`` is the finite radius used when summing shifted copies, equal
    to ``support`` for compactly supported kernels.
    """

    name: str
    support: float
    profile: Callable[[np.ndarray], np.ndarray]
    window: float = 0.0

    def __post_init__(self) -> None:
        if self.window <= 0.0:
            if not np.isfinite(self.support):
                raise ValueError("kernels with unbounded support need an explicit window")
            object.__setattr__(self, "window", self.support)

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        return self.profile(np.asarray(x, dtype=np.float64))


def _box_profile(x: np.ndarray) -> np.ndarray:
    # Half-open cell indicator: 1 on [-1/2, 1/2), so integer shifts tile the line.
    return np.where((x >= -0.5) & (x < 0.5), 1.0, 0.0)


def _bspline3_profile(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    inner = 2.0 / 3.0 - ax**2 + ax**3 / 2.0
    outer = (2.0 - ax) ** 3 / 6.0
    return np.where(ax <= 1.0, inner, np.where(ax <= 2.0, outer, 0.0))


def make_box() -> Kernel:
    """Indicator of [-1/2, 1/2); exact partition of unity, discontinuous."""
    return Kernel("box", 0.5, _box_profile)


def make_bspline3() -> Kernel:
    """Centred cubic B-spline: C^2, support radius 2, exact partition of unity."""
    return Kernel("bspline3", 2.0, _bspline3_profile)


def make_gaussian(sigma: float = 1.0, cutoff: float = 4.0) -> Kernel:
    """Gaussian mollifier (2*pi)^(-1/2)/sigma * exp(-x^2 / (2 sigma^2)).

    Satisfies partition of unity only up to an exponentially small ripple;
    ``cutoff`` (in units of sigma) is the window radius used when the kernel
    is summed over shifts.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    norm = 1.0 / (np.sqrt(2.0 * np.pi) * sigma)

    def profile(x: np.ndarray) -> np.ndarray:
        return norm * np.exp(-(x**2) / (2.0 * sigma**2))

    return Kernel(f"gaussian:{sigma:g}", np.inf, profile, window=cutoff * sigma)


def kernel_by_name(name: str) -> Kernel:
    """Parse a kernel name string: ``box``, ``bspline3``, or ``gaussian:SIGMA``."""
    if name == "box":
        return make_box()
    if name == "bspline3":
        return make_bspline3()
    if name.startswith("gaussian"):
        _, _, arg = name.partition(":")
        return make_gaussian(float(arg) if arg else 1.0)
    raise ValueError(f"unknown kernel {name!r}")


def check_partition_of_unity(kernel: Kernel, xs: np.ndarray | None = None) -> float:
    """Max deviation of sum_k kernel(x - k) from 1 over probe points in [0, 1)."""
    if xs is None:
        xs = np.linspace(0.0, 1.0, 257, endpoint=False)
    xs = np.asarray(xs, dtype=np.float64)
    radius = int(np.ceil(kernel.window)) + 1
    shifts = np.arange(-radius, radius + 1)
    total = kernel(xs[:, None] - shifts[None, :]).sum(axis=1)
    return float(np.max(np.abs(total - 1.0)))


def check_bounded(kernel: Kernel, bound: float, xs: np.ndarray | None = None) -> bool:
    """True if |kernel| <= bound on a probe grid covering the window."""
    if xs is None:
        xs = np.linspace(-kernel.window - 1.0, kernel.window + 1.0, 4097)
    return bool(np.all(np.abs(kernel(xs)) <= bound + 1e-15))


def check_decay(
    kernel: Kernel,
    q: int,
    delta: float,
    constant: float,
    xs: np.ndarray | None = None,
) -> bool:
    """True if |kernel(x)| <= constant * (1 + |x|)^(-q - delta) on a probe grid."""
    if delta <= 0 or constant <= 0:
        raise ValueError("delta and constant must be positive")
    if xs is None:
        xs = np.linspace(-kernel.window - 2.0, kernel.window + 2.0, 4097)
    xs = np.asarray(xs, dtype=np.float64)
    envelope = constant * (1.0 + np.abs(xs)) ** (-(q + delta))
    return bool(np.all(np.abs(kernel(xs)) <= envelope + 1e-15))


def kernel_integral(kernel: Kernel, points_per_segment: int = 16) -> float:
    """Quadrature integral of the kernel over the real line.

    Composite Gauss-Legendre over half-unit segments aligned to the window,
    which is exact for piecewise-polynomial kernels (segment edges land on
    the knots, and the interior nodes never touch a jump).  For kernels with
    unbounded support the integration radius is doubled so the neglected
    tail sits far below the 1e-10 accuracy target.
    """
    radius = kernel.window if np.isfinite(kernel.support) else 2.0 * kernel.window
    n_segments = max(int(np.ceil(4.0 * radius)), 1)
    edges = np.linspace(-radius, radius, n_segments + 1)
    nodes, weights = np.polynomial.legendre.leggauss(points_per_segment)
    half = np.diff(edges) / 2.0
    centres = (edges[:-1] + edges[1:]) / 2.0
    xs = centres[:, None] + half[:, None] * nodes[None, :]
    return float(np.sum(half[:, None] * weights[None, :] * kernel(xs)))


def discrete_gaussian_stencil(sigma: float) -> np.ndarray:
    """Normalized odd-length Gaussian weights with radius max(floor(3 sigma), 1).

    Returns the length 2K+1 vector w[i] proportional to
    exp(-(i-K)^2 / (2 sigma^2)), rescaled to sum exactly to 1.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = max(int(np.floor(3.0 * sigma)), 1)
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets**2) / (2.0 * sigma**2))
    return weights / weights.sum()
