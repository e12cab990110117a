"""Kantorovich sampling operators, smoothing filters, wavelet shrinkage, and
the volumetric experiment harness built on them."""

from . import core, experiments, kernels, metrics, operators, phantom, wavelet

__version__ = "0.1.0"

__all__ = [
    "core",
    "experiments",
    "kernels",
    "metrics",
    "operators",
    "phantom",
    "wavelet",
    "__version__",
]
