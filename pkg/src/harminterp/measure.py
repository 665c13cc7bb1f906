"""Atomic boundary measures, Poisson extensions, and evaluation grids.

Normalisation: :func:`poisson_kernel` is scaled so that its value at the
origin is 1 (equivalently, its average over the circle is 1).  A measure of
total mass ``m`` therefore has harmonic extension with ``u(0) == m``, and
probability measures correspond exactly to the positive harmonic functions
with ``u(0) == 1``.  Divide by ``2*pi`` to get densities with respect to
arc length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import mpmath
import numpy as np

from .arcs import TWO_PI, ArcSet, norm_angle
from .disc import DiscPoint, MobiusShift, hyperbolic_distance

__all__ = [
    "BoundaryMeasure",
    "UniformDensity",
    "GridSpec",
    "MeasureDomainError",
    "poisson_kernel",
    "poisson_matrix",
    "harmonic_measure_arc",
    "harnack_check",
]


class MeasureDomainError(ValueError):
    """Raised for malformed atomic measures (negative mass, shape mismatch)."""


def poisson_kernel(z: DiscPoint, theta) -> float:
    """Poisson kernel at ``exp(i*theta)`` seen from ``z``, normalised to 1 at 0.

    Stable form ``s(2-s) / (s^2 + 4(1-s) sin^2((theta - t)/2))`` with
    ``s = depth(z)``; accepts a scalar or an ndarray of angles, and mpf
    operands on the scalar path.
    """
    s = z.depth
    if isinstance(theta, np.ndarray):
        sf = float(s)
        half = 0.5 * (theta - float(z.theta))
        sin2 = np.sin(half) ** 2
        return sf * (2.0 - sf) / (sf * sf + 4.0 * (1.0 - sf) * sin2)
    if isinstance(s, mpmath.mpf) or isinstance(theta, mpmath.mpf) or isinstance(z.theta, mpmath.mpf):
        sin_h = mpmath.sin((theta - z.theta) / 2)
        return s * (2 - s) / (s * s + 4 * (1 - s) * sin_h * sin_h)
    sin_h = math.sin(0.5 * (theta - z.theta))
    return s * (2.0 - s) / (s * s + 4.0 * (1.0 - s) * sin_h * sin_h)


def poisson_matrix(points: Sequence[DiscPoint], angles: np.ndarray) -> np.ndarray:
    """Kernel matrix ``K[n, g] = poisson_kernel(points[n], angles[g])``."""
    thetas = np.array([float(p.theta) for p in points])[:, None]
    s = np.array([float(p.depth) for p in points])[:, None]
    sin2 = np.sin(0.5 * (angles[None, :] - thetas)) ** 2
    return s * (2.0 - s) / (s * s + 4.0 * (1.0 - s) * sin2)


@dataclass(frozen=True)
class BoundaryMeasure:
    """Finite nonnegative atomic measure on the circle."""

    angles: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float).reshape(-1)
        m = np.asarray(self.masses, dtype=float).reshape(-1)
        if a.shape != m.shape:
            raise MeasureDomainError(
                f"angles ({a.shape}) and masses ({m.shape}) must align"
            )
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(m)):
            raise MeasureDomainError("angles and masses must be finite")
        if np.any(m < 0):
            raise MeasureDomainError("masses must be nonnegative")
        a = np.mod(a, TWO_PI)
        a[a >= TWO_PI] = 0.0
        for arr in (a, m):
            arr.setflags(write=False)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "masses", m)

    # -- constructors -------------------------------------------------

    @classmethod
    def single_atom(cls, angle: float = 0.0, mass: float = 1.0) -> "BoundaryMeasure":
        return cls(np.array([angle]), np.array([mass]))

    @classmethod
    def uniform(cls, count: int, total: float = 1.0) -> "BoundaryMeasure":
        if count < 1:
            raise MeasureDomainError("need at least one atom")
        return cls(
            np.arange(count) * (TWO_PI / count),
            np.full(count, total / count),
        )

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]]) -> "BoundaryMeasure":
        pairs = list(pairs)
        return cls(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))

    # -- queries --------------------------------------------------------

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __len__(self) -> int:
        return int(self.angles.size)

    def poisson_eval(self, z: DiscPoint):
        """Harmonic extension at ``z`` (equals total mass at the origin)."""
        if isinstance(z.depth, mpmath.mpf) or isinstance(z.theta, mpmath.mpf):
            return mpmath.fsum(
                mpmath.mpf(m) * poisson_kernel(z, mpmath.mpf(t))
                for t, m in zip(self.angles, self.masses)
            )
        return float(np.dot(self.masses, poisson_kernel(z, self.angles)))

    def poisson_on_circle(self, depth: float, ray_angles: np.ndarray) -> np.ndarray:
        """Vectorised evaluation at all points ``(1-depth) e^{i ray_angles}``."""
        s = float(depth)
        half = 0.5 * (ray_angles[:, None] - self.angles[None, :])
        kern = s * (2.0 - s) / (s * s + 4.0 * (1.0 - s) * np.sin(half) ** 2)
        return kern @ self.masses

    def herglotz_eval(self, z: DiscPoint) -> complex:
        """Analytic completion ``u + i*conj_u`` with ``conj_u(0) == 0``."""
        zc = z.to_complex()
        xi = np.exp(1j * self.angles)
        vals = (xi + zc) / (xi - zc)
        return complex(np.dot(self.masses, vals))

    def conjugate_eval(self, z: DiscPoint) -> float:
        return self.herglotz_eval(z).imag

    def restricted(self, arcs: ArcSet) -> "BoundaryMeasure":
        keep = np.array([arcs.contains(t) for t in self.angles], dtype=bool)
        return BoundaryMeasure(self.angles[keep], self.masses[keep])


@dataclass(frozen=True)
class UniformDensity:
    """Arc-length boundary measure scaled to a given total mass.

    Its Poisson extension is the constant ``total`` everywhere — something
    no atomic discretisation can reproduce near the boundary, where each
    atom's kernel spikes.  Exposes the evaluation surface shared with
    :class:`BoundaryMeasure` so probes can run on genuinely constant
    functions.
    """

    total: float = 1.0

    def __post_init__(self):
        if not (self.total > 0 and math.isfinite(self.total)):
            raise MeasureDomainError("total mass must be positive and finite")

    @property
    def total_mass(self) -> float:
        return self.total

    def poisson_eval(self, z: DiscPoint) -> float:
        return self.total

    def poisson_on_circle(self, depth: float, ray_angles: np.ndarray) -> np.ndarray:
        return np.full(len(ray_angles), self.total)


def harmonic_measure_arc(z: DiscPoint, arcs: ArcSet) -> float:
    """Harmonic measure of a boundary set from ``z``: exact via the length
    of its conformal image, ``|tau_z(A)| / (2*pi)``."""
    return MobiusShift(z).apply_arcset(arcs).measure / TWO_PI


def harnack_check(measure: BoundaryMeasure, z: DiscPoint, w: DiscPoint, slack: float = 1e-12):
    """Validate the two-point Harnack bound for this measure's extension.

    Returns ``(log_ratio, bound, ok)`` where ``log_ratio = |log2 u(z) -
    log2 u(w)|`` and ``bound`` is the hyperbolic distance.
    """
    uz = measure.poisson_eval(z)
    uw = measure.poisson_eval(w)
    if uz <= 0 or uw <= 0:
        raise MeasureDomainError("extension must be positive (nonzero measure)")
    if isinstance(uz, mpmath.mpf) or isinstance(uw, mpmath.mpf):
        lhs = abs(mpmath.log(uz, 2) - mpmath.log(uw, 2))
    else:
        lhs = abs(math.log2(uz) - math.log2(uw))
    bound = hyperbolic_distance(z, w)
    return lhs, bound, lhs <= bound + slack


@dataclass(frozen=True)
class GridSpec:
    """Angle grid for LP discretisations: a uniform base grid plus optional
    per-point refinement angles clustered near sequence directions."""

    resolution: int = 4096
    refinement: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.resolution < 1:
            raise MeasureDomainError("resolution must be >= 1")
        object.__setattr__(
            self, "refinement", tuple(norm_angle(t) for t in self.refinement)
        )

    @classmethod
    def for_sequence(
        cls,
        points: Sequence[DiscPoint],
        resolution: int = 4096,
        per_point: int = 32,
    ) -> "GridSpec":
        """Base grid plus dyadic angle offsets ``theta_n ± pi*s_n*2^{-k}``
        so that every point's natural arc is resolved even when the
        sequence is much deeper than the base resolution."""
        extra: List[float] = []
        halves = max(0, per_point // 2)
        for p in points:
            t, s = float(p.theta), float(p.depth)
            extra.append(t)
            for k in range(1, halves + 1):
                off = math.pi * s * 2.0 ** (-k)
                extra.append(t + off)
                extra.append(t - off)
        return cls(resolution, tuple(extra))

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.resolution * factor, self.refinement)

    def angles(self) -> np.ndarray:
        base = np.arange(self.resolution) * (TWO_PI / self.resolution)
        if self.refinement:
            base = np.concatenate([base, np.array(self.refinement)])
        return np.unique(base)

    def voronoi_cells(self, angles: np.ndarray = None) -> List[ArcSet]:
        """Half-open cells around each grid angle, sharing endpoints bitwise
        so that the cells partition the circle exactly."""
        if angles is None:
            angles = self.angles()
        n = len(angles)
        if n == 0:
            raise MeasureDomainError("empty grid")
        if n == 1:
            return [ArcSet.full()]
        mids = [norm_angle(0.5 * (angles[g] + angles[g + 1])) for g in range(n - 1)]
        wrap = norm_angle(0.5 * (angles[-1] + angles[0] + TWO_PI))
        cells: List[ArcSet] = []
        for g in range(n):
            left = mids[g - 1] if g > 0 else wrap
            right = mids[g] if g < n - 1 else wrap
            if left < right:
                cells.append(ArcSet(((left, right),)))
            else:
                pieces = []
                if left < TWO_PI:
                    pieces.append((left, TWO_PI))
                if right > 0.0:
                    pieces.append((0.0, right))
                cells.append(ArcSet(pieces))
        return cells
