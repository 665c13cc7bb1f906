"""Deterministic sequence generators: canonical families plus stress cases.

Everything here is a pure function of its integer/real parameters; the
catalog is the fixed 30-sequence corpus the cross-consistency tests run
over.  The deep two-family pair produced by :func:`counterexample_pair`
is generated in multiprecision (the level depths shrink like ``2^-B`` with
``B`` in the hundreds, far below where float angles could keep the
circle-point geometry apart).
"""

from __future__ import annotations

import math
from typing import List, Tuple

import mpmath

from .classify import ClassifierError, PointSequence
from .disc import DiscPoint, MobiusShift, hyperbolic_distance

__all__ = [
    "radial_geometric",
    "dyadic_lattice",
    "counterexample_pair",
    "counterexample_workprec",
    "gallery_catalog",
    "GENERATORS",
]

_MAX_LATTICE_POINTS = 10_000


def radial_geometric(depth: int, ratio: float = 0.5, theta: float = 0.0) -> PointSequence:
    """Radial points with geometrically shrinking depths ``ratio^j``."""
    if depth < 1:
        raise ClassifierError("depth must be >= 1")
    if not (0.0 < ratio < 1.0):
        raise ClassifierError("ratio must lie in (0, 1)")
    pts = tuple(DiscPoint(theta, ratio ** j) for j in range(1, depth + 1))
    return PointSequence(pts, label=f"radial-{depth}" + ("" if ratio == 0.5 else f"-r{ratio}"))


def dyadic_lattice(depth: int, spread: int) -> PointSequence:
    """Level ``j`` holds ``spread^j`` equally spaced points at depth ``2^-j``.

    ``spread = 2`` doubles the population per halving of depth — the
    critical growth where the counting conditions only hold at exponent 1.
    """
    if depth < 1 or spread < 1:
        raise ClassifierError("depth and spread must be >= 1")
    total = sum(spread ** j for j in range(1, depth + 1))
    if total > _MAX_LATTICE_POINTS:
        raise ClassifierError(
            f"lattice would hold {total} points (cap {_MAX_LATTICE_POINTS})"
        )
    pts: List[DiscPoint] = []
    for j in range(1, depth + 1):
        count = spread ** j
        step = 2.0 * math.pi / count
        pts.extend(DiscPoint(i * step, 2.0 ** (-j)) for i in range(count))
    return PointSequence(tuple(pts), label=f"lattice-{depth}x{spread}")


# --------------------------------------------------------------------------
# the deep two-family pair


def _gap_after(k: int) -> int:
    """Hyperbolic gap between base points k and k+1 (grows linearly)."""
    n_next = 2 * (k + 1)
    return 8 * (k + 1) + 2 * n_next  # = 12(k+1)


def _base_distance(level: int) -> int:
    """Distance from the origin to base point ``level`` (1-indexed)."""
    return sum(_gap_after(k) for k in range(1, level))


def counterexample_workprec(levels: int) -> int:
    """Binary precision comfortably resolving the deepest circle points."""
    b_max = _base_distance(levels)
    return 2 * (b_max + 2 * levels) + 160


def counterexample_pair(levels: int) -> Tuple[PointSequence, PointSequence]:
    """Two families whose union defeats ball-counting at every exponent
    eventually: sparse radial base points with rapidly growing gaps, plus
    ``2^(n_k)`` satellites equally spaced on the hyperbolic circle of
    radius ``n_k = 2k`` about each base point.

    Each family alone satisfies the counting condition with a small
    exponent; at base point ``k`` the union packs ``2^(n_k)`` points within
    distance ``n_k``, which eventually exceeds every ``M 2^(alpha n_k)``
    with ``alpha < 1``.  (At desk levels the excess is visible in the
    fitted constants' growth; the count witness itself is exact.)
    """
    if levels < 1:
        raise ClassifierError("levels must be >= 1")
    if 2 ** (2 * levels) > _MAX_LATTICE_POINTS:
        raise ClassifierError(
            f"levels {levels} would need {2 ** (2 * levels)} satellites "
            f"(cap {_MAX_LATTICE_POINTS}); use levels <= 6"
        )
    prec = counterexample_workprec(levels)
    with mpmath.workprec(prec):
        bases: List[DiscPoint] = []
        satellites: List[DiscPoint] = []
        for k in range(1, levels + 1):
            b = _base_distance(k)
            # depth from the exact radial relation 2^b = (1+r)/(1-r)
            pow_b = mpmath.power(2, b)
            depth = 2 / (pow_b + 1)
            base = DiscPoint(mpmath.mpf(0), depth)
            bases.append(base)
            n_k = 2 * k
            count = 2 ** n_k
            # satellites: equal angles on the centred hyperbolic circle,
            # pushed out to the base point by the inverse shift
            radius = (mpmath.power(2, n_k) - 1) / (mpmath.power(2, n_k) + 1)
            back = MobiusShift(base).inverse()
            step = 2 * mpmath.pi / count
            for i in range(count):
                w = DiscPoint(i * step, 1 - radius)
                satellites.append(back.apply(w))
    z1 = PointSequence(tuple(bases), label=f"deep-bases-{levels}", workprec=prec)
    z2 = PointSequence(tuple(satellites), label=f"deep-satellites-{levels}", workprec=prec)
    return z1, z2


# --------------------------------------------------------------------------
# fixed catalog


def _ring(count: int, depth: float, phase: float = 0.0) -> List[DiscPoint]:
    step = 2.0 * math.pi / count
    return [DiscPoint(phase + i * step, depth) for i in range(count)]


def _catalog_builders():
    golden = math.pi * (3.0 - math.sqrt(5.0))

    def spiral():
        pts = [DiscPoint(k * golden, 0.5 * 0.6 ** k) for k in range(40)]
        return PointSequence(tuple(pts), label="spiral-40")

    def perturbed_radial():
        pts = [
            DiscPoint(((-1) ** j) * (2.0 ** -j), 2.0 ** -j) for j in range(1, 9)
        ]
        return PointSequence(tuple(pts), label="radial-8-wobble")

    def ring_tower():
        pts = []
        for j in range(1, 9):
            pts.extend(_ring(4, 2.0 ** -j, phase=0.3 * j))
        return PointSequence(tuple(pts), label="ring-tower-8")

    def cluster_pair():
        pts = []
        for k in range(5):
            pts.append(DiscPoint(0.0, 2.0 ** -(k + 1)))
            pts.append(DiscPoint(math.pi, 2.0 ** -(k + 1)))
        return PointSequence(tuple(pts), label="cluster-pair")

    def harmonic_depths():
        pts = [DiscPoint(0.0, 1.0 / (k + 2)) for k in range(21)]
        return PointSequence(tuple(pts), label="harmonic-21")

    def jittered_lattice():
        pts = []
        for j in range(1, 7):
            count = 2 ** j
            step = 2.0 * math.pi / count
            shift = 0.5 * 2.0 ** -j
            pts.extend(DiscPoint(shift + i * step, 2.0 ** -j) for i in range(count))
        return PointSequence(tuple(pts), label="lattice-6x2-jitter")

    def radial_plus_ring():
        pts = list(radial_geometric(8).points) + _ring(16, 0.1, phase=0.1)
        return PointSequence(tuple(pts), label="radial8+ring16")

    builders = [
        lambda: radial_geometric(10),
        lambda: radial_geometric(8),
        lambda: radial_geometric(6),
        lambda: radial_geometric(12, ratio=0.3),
        lambda: radial_geometric(10, ratio=0.7),
        lambda: radial_geometric(9, theta=1.0),
        lambda: dyadic_lattice(4, 2),
        lambda: dyadic_lattice(6, 2),
        lambda: dyadic_lattice(8, 2),
        lambda: dyadic_lattice(5, 3),
        lambda: dyadic_lattice(10, 1),
        lambda: counterexample_pair(3)[0],
        lambda: counterexample_pair(3)[1],
        lambda: _union_of_pair(3),
        lambda: counterexample_pair(4)[0],
        lambda: counterexample_pair(4)[1],
        lambda: _union_of_pair(4),
        lambda: PointSequence((DiscPoint(1.0, 0.25),), label="single"),
        lambda: PointSequence(
            (DiscPoint(0.0, 1e-4), DiscPoint(math.pi, 1e-4)), label="antipodal-deep"
        ),
        lambda: PointSequence(tuple(_ring(16, 0.1)), label="ring-16"),
        lambda: PointSequence(
            tuple(_ring(8, 0.1) + _ring(16, 0.05, phase=0.05)), label="double-ring"
        ),
        spiral,
        perturbed_radial,
        ring_tower,
        cluster_pair,
        harmonic_depths,
        lambda: PointSequence(tuple(_ring(100, 0.01)), label="crowd-100"),
        lambda: PointSequence(
            tuple(DiscPoint(0.0, 2.0 ** -(3 * k)) for k in range(1, 8)),
            label="sparse-deep",
        ),
        jittered_lattice,
        radial_plus_ring,
    ]
    return builders


def _union_of_pair(levels: int) -> PointSequence:
    z1, z2 = counterexample_pair(levels)
    return z1.union(z2, label=f"deep-union-{levels}")


def gallery_catalog() -> List[PointSequence]:
    """The fixed 30-sequence corpus used by the consistency suites."""
    out = [build() for build in _catalog_builders()]
    assert len(out) == 30
    return out


def min_cross_distance(z1: PointSequence, z2: PointSequence) -> float:
    """Brute-force minimum distance between two families."""
    prec = max(z1.workprec, z2.workprec, mpmath.mp.prec)
    best = math.inf
    with mpmath.workprec(prec):
        for p in z1:
            for q in z2:
                best = min(best, float(hyperbolic_distance(p, q)))
    return best


GENERATORS = {
    "radial": radial_geometric,
    "lattice": dyadic_lattice,
    "counterexample": counterexample_pair,
}
