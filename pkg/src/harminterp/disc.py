"""Hyperbolic geometry of the unit disc in boundary-depth coordinates.

Points are stored as ``(theta, depth)`` with ``depth = 1 - |z|``; all
kernels below are written so that no intermediate quantity cancels
catastrophically as ``depth -> 0``.  Every public function accepts either
native floats or ``mpmath.mpf`` operands; mpf inputs promote the whole
computation to the current mpmath working precision.

The distance :func:`hyperbolic_distance` is the base-2 variant
``log2((1+rho)/(1-rho))`` of the classical metric, chosen so that moving
one unit corresponds to at most doubling/halving of any positive harmonic
function (Harnack's inequality with constant exactly 2 per unit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import mpmath

from .arcs import TWO_PI, ArcSet, norm_angle

__all__ = [
    "DiscPoint",
    "MobiusShift",
    "CarlesonBox",
    "GeometryDomainError",
    "pseudo_hyperbolic",
    "hyperbolic_distance",
    "harnack_interval",
    "base_arc",
    "beta_depth_bound",
    "circular_distance",
]

Scalar = Union[float, mpmath.mpf]

_LN2 = math.log(2.0)


class GeometryDomainError(ValueError):
    """Raised for points outside the open unit disc or malformed arguments."""


def _any_mp(*values) -> bool:
    return any(isinstance(v, mpmath.mpf) for v in values)


def _two_pi(mp_mode: bool) -> Scalar:
    return 2 * mpmath.pi if mp_mode else TWO_PI


def _wrap_angle(theta: Scalar) -> Scalar:
    if isinstance(theta, mpmath.mpf):
        out = theta % (2 * mpmath.pi)
        if out < 0 or out >= 2 * mpmath.pi:
            out = mpmath.mpf(0)
        return out
    return norm_angle(theta)


def circular_distance(a: Scalar, b: Scalar) -> Scalar:
    """Shortest angular distance between two directions, in [0, pi]."""
    mp_mode = _any_mp(a, b)
    period = _two_pi(mp_mode)
    d = (a - b) % period
    if d < 0:
        d += period
    half = period / 2
    return d if d <= half else period - d


@dataclass(frozen=True)
class DiscPoint:
    """Point of the open unit disc, stored as angle and boundary depth.

    ``depth = 1 - |z|`` lies in ``(0, 1]``; ``depth == 1`` is the origin
    (whose angle is canonicalised to zero).
    """

    theta: Scalar
    depth: Scalar

    def __post_init__(self):
        d = self.depth
        if not (d > 0):
            raise GeometryDomainError(f"depth must be positive, got {d!r}")
        if d > 1:
            raise GeometryDomainError(f"depth must be at most 1, got {d!r}")
        if isinstance(d, float) and not math.isfinite(d):
            raise GeometryDomainError("depth must be finite")
        if d == 1:
            zero = mpmath.mpf(0) if isinstance(self.theta, mpmath.mpf) else 0.0
            object.__setattr__(self, "theta", zero)
        else:
            object.__setattr__(self, "theta", _wrap_angle(self.theta))

    # -- constructors ------------------------------------------------

    @classmethod
    def origin(cls) -> "DiscPoint":
        return cls(0.0, 1.0)

    @classmethod
    def from_polar(cls, radius: Scalar, theta: Scalar) -> "DiscPoint":
        if radius < 0 or radius >= 1:
            raise GeometryDomainError(f"radius must lie in [0, 1), got {radius!r}")
        return cls(theta, 1 - radius)

    @classmethod
    def from_xy(cls, x: float, y: float) -> "DiscPoint":
        r = math.hypot(x, y)
        if r >= 1.0:
            raise GeometryDomainError(f"({x}, {y}) is not inside the unit disc")
        if r == 0.0:
            return cls.origin()
        return cls(math.atan2(y, x), 1.0 - r)

    # -- coordinates -------------------------------------------------

    @property
    def r(self) -> Scalar:
        return 1 - self.depth

    @property
    def x(self) -> Scalar:
        c = mpmath.cos(self.theta) if _any_mp(self.theta, self.depth) else math.cos(self.theta)
        return (1 - self.depth) * c

    @property
    def y(self) -> Scalar:
        s = mpmath.sin(self.theta) if _any_mp(self.theta, self.depth) else math.sin(self.theta)
        return (1 - self.depth) * s

    def to_complex(self) -> complex:
        return complex(float(self.x), float(self.y))

    def is_origin(self) -> bool:
        return self.depth == 1


def _sin_half_sq(delta: Scalar, mp_mode: bool):
    if mp_mode:
        s = mpmath.sin(delta / 2)
    else:
        s = math.sin(0.5 * delta)
    return s * s


def _rho_parts(z: DiscPoint, w: DiscPoint) -> Tuple[Scalar, Scalar, bool]:
    """Shared kernel: numerator ``a2 = |z-w|^2`` and ``b2 = |1-conj(w)z|^2``."""
    s1, s2 = z.depth, w.depth
    mp_mode = _any_mp(s1, s2, z.theta, w.theta)
    q = 4 * (1 - s1) * (1 - s2) * _sin_half_sq(z.theta - w.theta, mp_mode)
    a2 = (s1 - s2) ** 2 + q
    b2 = (s1 + s2 - s1 * s2) ** 2 + q
    return a2, b2, mp_mode


def pseudo_hyperbolic(z: DiscPoint, w: DiscPoint) -> Scalar:
    """Pseudo-hyperbolic distance ``|z - w| / |1 - conj(w) z|`` in [0, 1)."""
    a2, b2, mp_mode = _rho_parts(z, w)
    if a2 == 0:
        return mpmath.mpf(0) if mp_mode else 0.0
    return mpmath.sqrt(a2 / b2) if mp_mode else math.sqrt(a2 / b2)


def hyperbolic_distance(z: DiscPoint, w: DiscPoint) -> Scalar:
    """Base-2 hyperbolic distance ``log2((1 + rho) / (1 - rho))``.

    Evaluated through ``2*log(b + a) - log(b^2 - a^2)`` with the exact
    factorisation ``b^2 - a^2 = s1(2-s1) s2(2-s2)``, which stays accurate
    for deep points where ``rho`` is within a few ulp of 1.
    """
    a2, b2, mp_mode = _rho_parts(z, w)
    if a2 == 0:
        return mpmath.mpf(0) if mp_mode else 0.0
    s1, s2 = z.depth, w.depth
    if mp_mode:
        rho = mpmath.sqrt(a2 / b2)
        num = 2 * mpmath.log(1 + rho) + mpmath.log(b2)
        den = (
            mpmath.log(s1) + mpmath.log(2 - s1) + mpmath.log(s2) + mpmath.log(2 - s2)
        )
        return (num - den) / mpmath.log(2)
    rho = math.sqrt(a2 / b2)
    num = 2.0 * math.log1p(rho) + math.log(b2)
    den = math.log(s1) + math.log(2.0 - s1) + math.log(s2) + math.log(2.0 - s2)
    return (num - den) / _LN2


def harnack_interval(z: DiscPoint, w: DiscPoint) -> Tuple[Scalar, Scalar]:
    """Sharp two-sided bounds on ``u(z)/u(w)`` over all positive harmonic u.

    Returns ``(2**-beta, 2**beta)`` with ``beta = hyperbolic_distance(z, w)``.
    """
    beta = hyperbolic_distance(z, w)
    if isinstance(beta, mpmath.mpf):
        hi = mpmath.power(2, beta)
    else:
        hi = 2.0 ** beta
    return 1 / hi, hi


def beta_depth_bound(scale: float) -> float:
    """Additive hyperbolic-distance budget for points sharing a boundary box.

    If ``w`` lies in the box of ``z`` dilated by ``scale`` (angular
    half-width ``scale*pi*depth(z)``, any depth ``<= scale*depth(z)``), then
    ``hyperbolic_distance(z, w) <= log2(depth(z)/depth(w)) + 2
    + 2*log2(1 + scale + pi*scale)``; this returns the depth-free part
    ``2 + 2*log2(1 + scale + pi*scale)``.
    """
    if scale <= 0:
        raise GeometryDomainError("scale must be positive")
    return 2.0 + 2.0 * math.log2(1.0 + scale + math.pi * scale)


def base_arc(z: DiscPoint, scale: float = 1.0) -> ArcSet:
    """Boundary arc shadowing ``z``: center ``theta``, half-width
    ``scale * pi * depth`` (saturating to the whole circle)."""
    if scale <= 0:
        return ArcSet.empty()
    half = scale * math.pi * float(z.depth)
    return ArcSet.centered(float(z.theta), min(math.pi, half))


@dataclass(frozen=True)
class CarlesonBox:
    """Boundary box: directions within ``pi*size`` of ``center``, depth <= ``size``.

    ``size`` is the normalised sidelength in ``(0, 1]``; ``size == 1`` is
    the whole disc.  Membership uses closed boundaries so that a point and
    its own box agree deterministically.
    """

    center: float
    size: float

    def __post_init__(self):
        if not (0 < self.size <= 1):
            raise GeometryDomainError(f"box size must lie in (0, 1], got {self.size!r}")
        object.__setattr__(self, "center", _wrap_angle(self.center))

    def contains(self, p: DiscPoint) -> bool:
        if p.depth > self.size:
            return False
        if self.size >= 1:
            return True
        if isinstance(self.size, mpmath.mpf) or _any_mp(p.theta, p.depth):
            half = mpmath.pi * self.size
        else:
            half = math.pi * self.size
        return circular_distance(p.theta, self.center) <= half

    def arc(self) -> ArcSet:
        return ArcSet.centered(float(self.center), min(math.pi, math.pi * float(self.size)))

    @classmethod
    def over(cls, p: DiscPoint, scale: float = 1.0) -> "CarlesonBox":
        size = min(1.0, scale * float(p.depth))
        return cls(float(p.theta), size)


@dataclass(frozen=True)
class MobiusShift:
    """Disc automorphism ``z -> (z - a) / (1 - conj(a) z)`` sending ``a`` to 0.

    ``MobiusShift(DiscPoint.origin())`` is the identity.  Composing with
    :meth:`inverse` round-trips coordinates to ~1e-12 for depths >= 1e-3;
    for much deeper, angularly close configurations the float angle
    difference itself limits the attainable accuracy (use mpf operands
    when that matters).
    """

    center: DiscPoint

    def __call__(self, z: DiscPoint) -> DiscPoint:
        return self.apply(z)

    def apply(self, z: DiscPoint) -> DiscPoint:
        a = self.center
        if a.is_origin():
            return z
        sa, sz = a.depth, z.depth
        mp_mode = _any_mp(sa, sz, a.theta, z.theta)
        v = z.theta - a.theta
        if mp_mode:
            sin_v = mpmath.sin(v)
            sq = _sin_half_sq(v, True)
            atan2_, sqrt_ = mpmath.atan2, mpmath.sqrt
        else:
            sin_v = math.sin(v)
            sq = _sin_half_sq(v, False)
            atan2_, sqrt_ = math.atan2, math.sqrt
        one_minus_sz = 1 - sz
        prod = (1 - sa) * one_minus_sz
        cross = sa + sz - sa * sz
        a2 = (sa - sz) ** 2 + 4 * prod * sq
        if a2 == 0:  # z coincides with the shift center
            return DiscPoint(mpmath.mpf(0), mpmath.mpf(1)) if mp_mode else DiscPoint.origin()
        num_angle = a.theta + atan2_(one_minus_sz * sin_v, (sa - sz) - 2 * one_minus_sz * sq)
        den_angle = atan2_(-prod * sin_v, cross + 2 * prod * sq)
        b2 = cross * cross + 4 * prod * sq
        rho2 = a2 / b2
        if rho2 <= 0.5:
            # shallow image: the direct quotient is cancellation-free
            s_img = 1 - sqrt_(rho2)
        else:
            # deep image: use 1 - rho^2 = s_a(2-s_a) s_z(2-s_z) / b2 exactly
            t = sa * (2 - sa) * sz * (2 - sz) / b2
            s_img = t / (1 + sqrt_(1 - t if t < 1 else 0 * t))
        return DiscPoint(num_angle - den_angle, s_img)

    def boundary_angle(self, phi: Scalar) -> Scalar:
        """Image angle of a boundary point: the circle map induced by the shift."""
        a = self.center
        sa = a.depth
        mp_mode = _any_mp(sa, a.theta, phi)
        u = phi - a.theta
        if mp_mode:
            sin_u = mpmath.sin(u)
            sq = _sin_half_sq(u, True)
            psi = phi + 2 * mpmath.atan2((1 - sa) * sin_u, sa + 2 * (1 - sa) * sq)
        else:
            sin_u = math.sin(u)
            sq = _sin_half_sq(u, False)
            psi = phi + 2 * math.atan2((1 - sa) * sin_u, sa + 2 * (1 - sa) * sq)
        return _wrap_angle(psi)

    def apply_arcset(self, arcs: ArcSet) -> ArcSet:
        """Image of a boundary arc union (orientation preserving, exact
        lengths up to endpoint rounding)."""
        if arcs.is_full():
            return ArcSet.full()
        sa = float(self.center.depth)
        # worst-case stretch of the boundary map, used to detect a spurious
        # wrap-around when a piece is only a few ulp long
        max_stretch = (2.0 - sa) / sa
        out = ArcSet.empty()
        for s, e in arcs:
            ps = float(self.boundary_angle(s))
            pe = float(self.boundary_angle(e))
            width = (pe - ps) % TWO_PI
            if width > min(TWO_PI, 4.0 * max_stretch * (e - s)) and width > 3.0:
                continue  # degenerate piece rounded across the seam
            out = out | ArcSet.from_interval(ps, ps + width)
        return out

    def inverse(self) -> "MobiusShift":
        a = self.center
        if a.is_origin():
            return self
        mp_mode = _any_mp(a.theta, a.depth)
        pi_ = mpmath.pi if mp_mode else math.pi
        return MobiusShift(DiscPoint(a.theta + pi_, a.depth))

    @classmethod
    def identity(cls) -> "MobiusShift":
        return cls(DiscPoint.origin())
