"""Pattern statistics of Schur-measure and plane-partition point processes."""

from __future__ import annotations

__version__ = "0.1.0"

from .combinatorics import Partition, Pattern, PlanePartition, SitePP  # noqa: E402
from .contour import QuadSettings  # noqa: E402
from .kernels import KernelSpec, kernel_matrix  # noqa: E402
from .specialfn import GCoefficients, QParam  # noqa: E402

__all__ = [
    "GCoefficients",
    "KernelSpec",
    "Partition",
    "Pattern",
    "PlanePartition",
    "QParam",
    "QuadSettings",
    "SitePP",
    "kernel_matrix",
    "__version__",
]
