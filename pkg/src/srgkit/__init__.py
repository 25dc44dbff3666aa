"""srgkit: certification of nonlinear multivariable feedback loops.

The toolbox bounds operator gain/phase behavior by conjugate-symmetric
regions of the complex plane, combines the regions through a sound set
calculus mirroring the loop algebra, and turns region separation into
well-posedness, stability and incremental L2-gain certificates that a
time-domain simulation oracle can cross-check.
"""

__version__ = "0.1.0"

from .errors import HypothesisError, InputError
from .region import (
    CoverRegion,
    DiskAlgebraRegion,
    arc_completion,
    chord_completion,
    disk,
    disk_between,
    dist,
    improved_product,
    improved_sum,
    minkowski_product,
    minkowski_sum,
    mobius_inverse,
    rmin,
    scale_real,
    shift_real,
    to_cover,
)

__all__ = [
    "__version__",
    "InputError",
    "HypothesisError",
    "CoverRegion",
    "DiskAlgebraRegion",
    "disk",
    "disk_between",
    "to_cover",
    "scale_real",
    "shift_real",
    "mobius_inverse",
    "minkowski_sum",
    "minkowski_product",
    "chord_completion",
    "arc_completion",
    "improved_sum",
    "improved_product",
    "rmin",
    "dist",
]
