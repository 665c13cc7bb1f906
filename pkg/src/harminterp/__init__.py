"""Tools for interpolation problems in the cone of positive harmonic functions.

Subpackages cover hyperbolic geometry of the unit disc, atomic boundary
measures and their Poisson extensions, density classifiers for point
sequences, LP-based interpolation solvers with exact certificates, a
stopping-time boundary-set construction, and numerical probes.
"""

__version__ = "0.1.0"

from .arcs import ArcSet
from .classify import DensityConstants, PointSequence, classify_sequence
from .disc import DiscPoint, MobiusShift, hyperbolic_distance, pseudo_hyperbolic
from .measure import BoundaryMeasure, GridSpec
from .solver import InterpolationProblem, solve_direct

__all__ = [
    "ArcSet",
    "BoundaryMeasure",
    "DensityConstants",
    "DiscPoint",
    "GridSpec",
    "InterpolationProblem",
    "MobiusShift",
    "PointSequence",
    "classify_sequence",
    "hyperbolic_distance",
    "pseudo_hyperbolic",
    "solve_direct",
]
