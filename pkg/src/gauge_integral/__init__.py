"""Gauge (Henstock and McShane) integration of convex-set-valued functions on [0, 1].

Set-valued Riemann sums are formed either geometrically, by Minkowski
combination of vertex bodies, or in a support-function embedding where convex
bodies become vectors in a finite-dimensional M-space.
"""

from .convex import ConvexBody, box, hausdorff, interval, minkowski_sum, scale
from .integrands import integrand_from_config
from .integrator import (IntegrationReport, Path, Status, integrate_monotone_bracket,
                         integrate_norm, integrate_order, integrate_simple, riemann_sum)
from .lattice import NormKind, OSequence
from .partition import MeasurableSet, TaggedPartition, TagMode
from .radstrom import DirectionGrid, SupportVector, embed, make_grid, reconstruct, sup_distance

__version__ = "0.1.0"

__all__ = [
    "ConvexBody", "DirectionGrid", "IntegrationReport", "MeasurableSet", "NormKind",
    "OSequence", "Path", "Status", "SupportVector", "TagMode", "TaggedPartition", "box",
    "embed", "hausdorff", "integrand_from_config", "integrate_monotone_bracket",
    "integrate_norm", "integrate_order", "integrate_simple", "interval", "make_grid",
    "minkowski_sum", "reconstruct", "riemann_sum", "scale", "sup_distance",
]
