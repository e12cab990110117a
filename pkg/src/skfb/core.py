"""Grids, volumes, regions of interest, norms, and VOL1 file I/O.

Arrays are float64 throughout, axes are ordered row-major (axis 0 is the
slowest), and every sampled field lives on one of two grid conventions:

* ``node``: axis coordinates i / (dim - 1), endpoints included;
* ``cell``: axis coordinates (i + 0.5) / dim, cell centres of [0, 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

GRID_KINDS = ("node", "cell")

# How each boundary policy extends an array past its edge, in np.pad terms.
PAD_MODES = {"reflect": "symmetric", "clamp": "edge", "periodic": "wrap"}

DEFAULT_BOUNDARY = "reflect"


def axis_coords(dim: int, grid: str = "node") -> np.ndarray:
    """Coordinates of one axis of a sampling grid on [0, 1]."""
    if grid not in GRID_KINDS:
        raise ValueError(f"unknown grid kind {grid!r}")
    if grid == "node":
        if dim < 2:
            raise ValueError("a node grid needs at least 2 points per axis")
        return np.arange(dim) / (dim - 1)
    if dim < 1:
        raise ValueError("a cell grid needs at least 1 cell per axis")
    return (np.arange(dim) + 0.5) / dim


@dataclass(frozen=True, eq=False)
class Volume:
    """A 1-, 2- or 3-dimensional float64 field sampled on a unit grid."""

    data: np.ndarray
    grid: str = "node"

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim not in (1, 2, 3):
            raise ValueError(f"volume must be 1-, 2- or 3-dimensional, got ndim={arr.ndim}")
        if self.grid not in GRID_KINDS:
            raise ValueError(f"unknown grid kind {self.grid!r}")
        if not np.isfinite(arr).all():
            raise ValueError("volume data must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def coords(self) -> tuple[np.ndarray, ...]:
        """Per-axis coordinate vectors for this volume's grid."""
        return tuple(axis_coords(d, self.grid) for d in self.dims)


@dataclass(frozen=True)
class Roi:
    """An axis-aligned index window, one (start, stop) half-open pair per axis."""

    bounds: tuple[tuple[int, int], ...]
    name: str = ""

    def __post_init__(self) -> None:
        for lo, hi in self.bounds:
            if not (0 <= lo < hi):
                raise ValueError(f"bad ROI bounds ({lo}, {hi})")

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(lo, hi) for lo, hi in self.bounds)


def extract_roi(data: np.ndarray | Volume, roi: Roi) -> np.ndarray:
    """Crop an ROI window out of an array (returns a copy)."""
    arr = data.data if isinstance(data, Volume) else np.asarray(data, dtype=np.float64)
    if len(roi.bounds) != arr.ndim:
        raise ValueError(f"ROI has {len(roi.bounds)} axes, data has {arr.ndim}")
    for (lo, hi), dim in zip(roi.bounds, arr.shape):
        if hi > dim:
            raise ValueError(f"ROI bound {hi} exceeds axis length {dim}")
    return arr[roi.slices()].copy()


def sample_function(
    f: Callable[..., np.ndarray],
    dims: Sequence[int],
    grid: str = "node",
) -> Volume:
    """Sample ``f(x)``, ``f(x, y)`` or ``f(x, y, z)`` on a unit grid.

    ``f`` must accept one array argument per axis and broadcast; axis 0 of
    the result varies the first argument.
    """
    axes = [axis_coords(d, grid) for d in dims]
    mesh = np.meshgrid(*axes, indexing="ij")
    try:
        values = f(*mesh)
    except TypeError as exc:
        raise ValueError(f"function does not accept {len(dims)} coordinate arguments") from exc
    values = np.broadcast_to(np.asarray(values, dtype=np.float64), tuple(dims))
    return Volume(values.copy(), grid=grid)


def mid_slice(volume: Volume | np.ndarray, axis: int = 0, index: int | None = None) -> np.ndarray:
    """The middle (or ``index``-th) slice of a volume along ``axis``."""
    arr = volume.data if isinstance(volume, Volume) else np.asarray(volume, dtype=np.float64)
    if not (0 <= axis < arr.ndim):
        raise ValueError(f"axis {axis} out of range for ndim={arr.ndim}")
    if index is None:
        index = arr.shape[axis] // 2
    if not (0 <= index < arr.shape[axis]):
        raise ValueError(f"slice index {index} out of range for axis length {arr.shape[axis]}")
    return np.take(arr, index, axis=axis)


def lp_distance(a: np.ndarray, b: np.ndarray, p: float = 2.0) -> float:
    """Sample-mean l^p distance: ((1/N) sum |a-b|^p)^(1/p), or max for p=inf."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = np.abs(a - b)
    if np.isinf(p):
        return float(diff.max())
    if p < 1:
        raise ValueError("p must be >= 1 or inf")
    return float(np.mean(diff**p) ** (1.0 / p))


def pad_array(arr: np.ndarray, radius: int | Sequence[int], boundary: str = DEFAULT_BOUNDARY) -> np.ndarray:
    """Extend an array past every edge according to a boundary policy."""
    if boundary not in PAD_MODES:
        raise ValueError(f"unknown boundary policy {boundary!r}")
    if np.isscalar(radius):
        widths: list[tuple[int, int]] = [(int(radius), int(radius))] * arr.ndim
    else:
        widths = [(int(r), int(r)) for r in radius]
    return np.pad(arr, widths, mode=PAD_MODES[boundary])


# ---------------------------------------------------------------------------
# VOL1 container: one JSON header line, then raw little-endian float64,
# row-major.  Round trips are bit exact.
# ---------------------------------------------------------------------------

VOL_MAGIC = "VOL1"


def write_vol(path: str | Path, volume: Volume) -> None:
    """Write a volume to a VOL1 file."""
    header = {
        "magic": VOL_MAGIC,
        "dims": list(volume.dims),
        "dtype": "f64le",
        "order": "row-major",
        "grid": volume.grid,
    }
    payload = np.ascontiguousarray(volume.data, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("ascii") + b"\n")
        fh.write(payload)


def read_vol(path: str | Path) -> Volume:
    """Read a VOL1 file back into a Volume (bit-exact inverse of write_vol)."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line.decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValueError(f"{path}: not a VOL1 file (bad header)") from exc
        if header.get("magic") != VOL_MAGIC:
            raise ValueError(f"{path}: bad magic {header.get('magic')!r}")
        if header.get("dtype") != "f64le" or header.get("order") != "row-major":
            raise ValueError(f"{path}: unsupported encoding {header}")
        dims = tuple(int(d) for d in header["dims"])
        raw = fh.read()
    expected = int(np.prod(dims)) * 8
    if len(raw) != expected:
        raise ValueError(f"{path}: payload is {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype="<f8").reshape(dims)
    return Volume(data.copy(), grid=header.get("grid", "node"))
