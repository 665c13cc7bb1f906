"""Superlevel-set radial projections and the extremal-growth counting check.

Two numeric probes for the geometry behind one-sided interpolation: how
much of the boundary is shadowed by the region where a positive harmonic
function exceeds a multiple of its central value, and whether a node
sequence can carry the extremal value assignment ``2^(eps * distance to
the base node)`` while keeping per-shell node counts under a geometric
ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .classify import PointSequence
from .disc import DiscPoint, MobiusShift
from .measure import BoundaryMeasure, GridSpec
from .solver import InterpolationProblem, InterpolationResult, solve_direct

__all__ = [
    "ProbeError",
    "RadialProjectionEstimate",
    "ReplayReport",
    "ray_flags",
    "ray_max_profile",
    "radial_projection_measure",
    "necessity_replay",
]

# Radial sampling stops at this distance from the boundary; superlevel
# sets of atomic Poisson integrals concentrate over the atoms, and the
# geometric ladder resolves them at bounded cost.
_DEPTH_FLOOR_EXP = 8.0


class ProbeError(ValueError):
    """Invalid probe input."""


@dataclass(frozen=True)
class RadialProjectionEstimate:
    """Measured size of the boundary shadow of a superlevel set.

    ``measure`` is ``2*pi`` times the fraction of sampled rays on which
    the normalized function ``u/u(0)`` was seen above ``threshold``.
    """

    threshold: float
    measure: float
    ray_count: int
    radial_samples: int

    @property
    def scaled(self) -> float:
        """``measure * threshold`` — the quantity a C/threshold bound caps."""
        return self.measure * self.threshold


def _depth_ladder(radial: int) -> np.ndarray:
    # 10^(-8k/radial) for k = 1..radial: doubling `radial` refines the
    # ladder without moving existing rungs, so measured projections are
    # monotone under sampling refinement.
    return np.power(10.0, -_DEPTH_FLOOR_EXP * np.arange(1, radial + 1) / radial)


def _check_sampling(mu, threshold: Optional[float], rays: int, radial: int) -> None:
    if mu.total_mass <= 0:
        raise ProbeError("measure must have positive total mass")
    if threshold is not None and not (threshold > 1):
        raise ProbeError(f"threshold must exceed 1, got {threshold!r}")
    if rays < 1 or radial < 1:
        raise ProbeError("sampling counts must be positive")


def ray_flags(
    mu, threshold: float, rays: int = 8192, radial: int = 256
) -> np.ndarray:
    """Boolean mask over ``rays`` uniform directions: True where the ray
    meets the region ``u > threshold * u(0)``.

    ``mu`` is anything with ``total_mass`` and ``poisson_on_circle``
    (an atomic measure or the exact uniform density).
    """
    _check_sampling(mu, threshold, rays, radial)
    angles = np.arange(rays) * (2.0 * math.pi / rays)
    bar = threshold * mu.total_mass
    flagged = np.zeros(rays, dtype=bool)
    for depth in _depth_ladder(radial):
        todo = ~flagged
        if not todo.any():
            break
        flagged[todo] = mu.poisson_on_circle(float(depth), angles[todo]) > bar
    return flagged


def ray_max_profile(mu, rays: int = 8192, radial: int = 256) -> np.ndarray:
    """Per-ray maximum of ``u / u(0)`` over the whole depth ladder.

    Thresholding this profile at ``t`` reproduces ``ray_flags(mu, t)``
    exactly, which makes sweeps over many thresholds one pass instead of
    one ladder walk each.
    """
    _check_sampling(mu, None, rays, radial)
    angles = np.arange(rays) * (2.0 * math.pi / rays)
    best = np.zeros(rays)
    for depth in _depth_ladder(radial):
        np.maximum(best, mu.poisson_on_circle(float(depth), angles), out=best)
    return best / mu.total_mass


def radial_projection_measure(
    mu, threshold: float, rays: int = 8192, radial: int = 256
) -> RadialProjectionEstimate:
    """Sampled measure of the radial projection of ``{u > threshold*u(0)}``."""
    flagged = ray_flags(mu, threshold, rays, radial)
    return RadialProjectionEstimate(
        threshold=float(threshold),
        measure=2.0 * math.pi * int(flagged.sum()) / rays,
        ray_count=rays,
        radial_samples=radial,
    )


@dataclass(frozen=True)
class ReplayReport:
    """Outcome of the extremal-value feasibility run on a sequence.

    ``shell_counts[j]`` is the number of nodes at distance in [j, j+1)
    from the base node; ``growth_ceiling`` is the smallest constant C with
    ``shell_counts[j] <= C * 2^((1-eps) j)`` for every shell.  When the
    extremal problem is infeasible the counting bound is moot: ``eps``
    already exceeds what the sequence can interpolate.
    """

    epsilon: float
    feasible: bool
    shell_counts: Tuple[int, ...]
    growth_ceiling: float
    result: InterpolationResult

    def bound_holds(self, constant: float) -> bool:
        return self.feasible and self.growth_ceiling <= constant


def necessity_replay(
    seq: PointSequence,
    epsilon: float,
    grid: Optional[GridSpec] = None,
    solver: Callable[..., InterpolationResult] = solve_direct,
    base_index: Optional[int] = None,
) -> ReplayReport:
    """Run the extremal assignment ``w_k = 2^(eps * beta(z_k, base))``.

    The base node is moved to the origin first (a disc automorphism, so
    feasibility is unchanged); by default the first origin node is used
    if one exists, else node 0.  The returned report carries the solver
    verdict together with per-shell counts of nodes by distance to the
    base and the fitted geometric-growth constant.
    """
    pts = list(seq.points)
    if base_index is None:
        origins = [i for i, p in enumerate(pts) if p.is_origin()]
        base_index = origins[0] if origins else 0
    if not (0 <= base_index < len(pts)):
        raise ProbeError(f"base index {base_index} out of range")
    if not pts[base_index].is_origin():
        shift = MobiusShift(pts[base_index])
        pts = [shift(p) for p in pts]
        seq = PointSequence(tuple(pts), label=f"{seq.label}|recentered")

    # distance to the origin has the closed form log2((2-s)/s)
    dists = np.array([math.log2((2.0 - float(p.depth)) / float(p.depth)) for p in pts])
    values = np.exp2(epsilon * dists)
    problem = InterpolationProblem(seq, tuple(values), epsilon=epsilon)
    result = solver(problem, grid) if grid is not None else solver(problem)

    shells = np.floor(dists).astype(int)
    counts = np.bincount(shells)
    ceiling = float(
        max(c / 2.0 ** ((1.0 - epsilon) * j) for j, c in enumerate(counts) if c)
    )
    return ReplayReport(
        epsilon=float(epsilon),
        feasible=result.feasible,
        shell_counts=tuple(int(c) for c in counts),
        growth_ceiling=ceiling,
        result=result,
    )
