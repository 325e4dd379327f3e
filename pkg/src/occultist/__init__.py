"""Exact occultation, projective convex bodies and combination certificates."""

from ._kernel import KERNEL
from .occultation import FULL, WEAK, occultation_check
from .projgeom import ConePolytope, ProjHyp, ProjMap, ProjPoint, make_body

__version__ = "0.1.0"

__all__ = [
    "KERNEL",
    "FULL",
    "WEAK",
    "occultation_check",
    "ConePolytope",
    "ProjHyp",
    "ProjMap",
    "ProjPoint",
    "make_body",
    "__version__",
]
