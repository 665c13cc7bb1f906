"""Stopping-time construction of disjoint boundary sets and the one-sided
interpolant assembled from them.

Given a node sequence passing the counting condition, the pipeline

  fit_m0  ->  choose_params  ->  build_e_sets  ->  build_gn
          ->  verify_estimates  ->  solve_hinfty_partition  ->  assemble_u

produces, for any split of the nodes into an upper side T and a lower
side S, an atomic boundary measure whose Poisson integral sits at or
above the prescribed values on T and at or below them on S.

All boundary sets are exact arc unions (:class:`~harminterp.arcs.ArcSet`),
so disjointness and containment are checked with no tolerance at all.
Parameters are sized from closed-form majorants; because those majorants
are brutally conservative, realistic float-depth sequences land entirely
inside one "near" cluster (every pairwise distance far below the cutoff
``cap_n``), and the stopping-time recursion resolves without ever taking
its far-node branch.  The branch is still implemented and unit-tested
with hand-built parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import lp
from .arcs import ArcSet
from .classify import DensityConstants, PointSequence, pairwise_beta
from .disc import CarlesonBox, DiscPoint, base_arc, hyperbolic_distance
from .measure import BoundaryMeasure, GridSpec, harmonic_measure_arc

__all__ = [
    "ConstructionError",
    "ResolutionError",
    "ConstructionParams",
    "ShiftedPoint",
    "GnFamily",
    "box_comparability_constant",
    "fit_m0",
    "shifted_point",
    "choose_params",
    "build_e_sets",
    "build_gn",
    "verify_estimates",
    "solve_hinfty_partition",
    "assemble_u",
]


class ConstructionError(RuntimeError):
    """A pipeline postcondition failed — parameter bug, not user error."""


class ResolutionError(ConstructionError):
    """The grid was too coarse for the separation LP to find a level."""


def box_comparability_constant(m0: float) -> float:
    """Distance-versus-depth comparability constant for points inside a
    ``20 * m0``-scaled box: within such a box,
    ``|beta - log2(depth ratio)|`` never exceeds this value."""
    scale = 20.0 * m0
    return 2.0 + 2.0 * math.log2(1.0 + scale + math.pi * scale)


@dataclass(frozen=True)
class ConstructionParams:
    """Knobs of the boundary-set construction.

    ``delta`` is the coverage defect budget; ``m0`` the arc dilation
    making every node see its own arc with measure ``>= 1 - delta/100``;
    ``gamma`` the inward-shift fraction; ``cap_n`` the near/far distance
    cutoff; ``eta`` the tail-weight exponent.
    """

    delta: float
    m0: float
    gamma: float
    cap_n: int
    eta: float

    def __post_init__(self):
        if not (0 < self.delta < 1):
            raise ConstructionError(f"delta must lie in (0,1), got {self.delta!r}")
        if self.m0 <= 0 or self.gamma <= 0 or not (0 < self.gamma < 1):
            raise ConstructionError("m0 must be positive and gamma in (0,1)")
        if self.cap_n < 1 or not (0 < self.eta < 1):
            raise ConstructionError("cap_n must be >= 1 and eta in (0,1)")

    def admissible_for(self, alpha: float) -> bool:
        """The smallness conditions tying the knobs to a growth exponent:
        ``alpha + C * gamma < 1`` and ``eta < min((1-alpha)/2, gamma/2C)``."""
        c = box_comparability_constant(self.m0)
        return (
            alpha + c * self.gamma < 1
            and self.eta < min((1 - alpha) / 2, self.gamma / (2 * c))
        )


@dataclass(frozen=True)
class ShiftedPoint:
    """A node pulled toward the origin along its own radius by a fixed
    fraction of its distance to an owner node."""

    owner: int
    index: int
    point: DiscPoint


@dataclass(frozen=True)
class GnFamily:
    """Output of the stopping-time recursion, aligned with the input
    sequence order.  ``g_sets`` are pairwise disjoint, each contained in
    the matching ``e_sets`` entry, which sits inside the ``m0``-dilated
    node arc.  ``neighbors[n]`` lists the nodes within distance ``cap_n``
    of node ``n`` (closed comparison, self included)."""

    g_sets: Tuple[ArcSet, ...]
    e_sets: Tuple[ArcSet, ...]
    neighbors: Tuple[Tuple[int, ...], ...]
    params: ConstructionParams

    def validate(self, seq: PointSequence) -> None:
        d = len(self.g_sets)
        for i in range(d):
            gi = self.g_sets[i]
            if gi.difference(self.e_sets[i]).pieces:
                raise ConstructionError(f"G_{i} escapes E_{i}")
            hull = base_arc(seq.points[i], self.params.m0)
            if self.e_sets[i].difference(hull).pieces:
                raise ConstructionError(f"E_{i} escapes its dilated arc")
            for j in range(i + 1, d):
                if gi.intersection(self.g_sets[j]).pieces:
                    raise ConstructionError(f"G_{i} and G_{j} overlap")


def fit_m0(seq: PointSequence, delta: float) -> float:
    """Smallest power-of-two dilation giving every node harmonic measure
    ``>= 1 - delta/100`` of its own dilated arc (doubling search on the
    exact arc image)."""
    if not (0 < delta < 1):
        raise ConstructionError(f"delta must lie in (0,1), got {delta!r}")
    pts = _float_points(seq)
    target = 1 - delta / 100
    m0 = 1.0
    while m0 < 2.0 ** 40:
        if all(harmonic_measure_arc(z, base_arc(z, m0)) >= target for z in pts):
            return m0
        m0 *= 2
    raise ConstructionError("dilation search failed to saturate")  # pragma: no cover


def shifted_point(
    z_k: DiscPoint, z_n: DiscPoint, gamma: float, owner: int = -1, index: int = -1
) -> ShiftedPoint:
    """Point on the radius through ``z_n``, closer to the origin, at
    hyperbolic distance ``gamma * beta(z_k, z_n)`` from ``z_n``.

    Closed-form: along a radius the distance inverts exactly, giving
    depth ``(1 + rho) s / ((1 - rho) + rho s)`` with
    ``rho = (2^b - 1)/(2^b + 1)``.  Should the shift overshoot the
    origin, the geodesic continues onto the opposite radius.  A 1-D
    bisection backstop guards the same-radius branch.
    """
    if z_k == z_n:
        raise ConstructionError("shift needs two distinct nodes")
    b = gamma * float(hyperbolic_distance(z_k, z_n))
    if b == 0:
        return ShiftedPoint(owner, index, z_n)
    u = 2.0 ** (-b)  # in (0, 1); rho = (1-u)/(1+u), 1-rho = 2u/(1+u)
    rho = (1.0 - u) / (1.0 + u)
    one_minus_rho = 2.0 * u / (1.0 + u)
    s = float(z_n.depth)
    theta = float(z_n.theta)
    r = 1.0 - s
    s_new = (1.0 + rho) * s / (one_minus_rho + rho * s)
    if s_new <= 1.0:
        p = DiscPoint(theta, s_new)
        if abs(float(hyperbolic_distance(p, z_n)) - b) > 1e-10:
            p = DiscPoint(theta, _bisect_depth(z_n, b))
        return ShiftedPoint(owner, index, p)
    # overshoot: the geodesic through the origin exits on the far radius;
    # depth there is (1-rho)(1+r) / (1 - rho r), kept cancellation-free
    depth_far = one_minus_rho * (1.0 + r) / (s + one_minus_rho * r)
    if depth_far <= 0:
        raise ConstructionError("shift distance exceeds float depth range")
    return ShiftedPoint(owner, index, DiscPoint(theta + math.pi, depth_far))


def _bisect_depth(z_n: DiscPoint, b: float) -> float:
    lo, hi = float(z_n.depth), 1.0
    ref = z_n
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(hyperbolic_distance(DiscPoint(float(z_n.theta), mid), ref)) < b:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * hi:
            break
    return 0.5 * (lo + hi)


def _float_points(seq: PointSequence) -> List[DiscPoint]:
    if seq.is_float():
        return list(seq.points)
    return [DiscPoint(float(p.theta), float(p.depth)) for p in seq.points]


def _stolz_layer_count(seq: PointSequence, m0: float) -> int:
    """Largest number of strictly-shallower nodes found in one unit
    distance layer of any node's Stolz cone of opening ``11 m0``."""
    pts = _float_points(seq)
    beta = pairwise_beta(seq)
    worst = 1
    for n, zn in enumerate(pts):
        buckets: dict = {}
        for k, zk in enumerate(pts):
            if k == n or zk.depth <= zn.depth:
                continue  # want |z_k| < |z_n|, i.e. deeper-origin side
            gap = math.sqrt(
                zk.r ** 2 + 1 - 2 * zk.r * math.cos(float(zk.theta) - float(zn.theta))
            )
            if gap <= 11 * m0 * float(zk.depth):
                j = int(beta[n, k])
                buckets[j] = buckets.get(j, 0) + 1
        if buckets:
            worst = max(worst, max(buckets.values()))
    return worst


def _size_from_majorant(coefficient: float, rate: float, budget: float) -> int:
    """Smallest integer N with coefficient * 2^(rate*N) <= budget, rate < 0."""
    if coefficient <= budget:
        return 1
    return max(1, math.ceil(math.log2(coefficient / budget) / (-rate)))


def choose_params(
    seq: PointSequence, constants: DensityConstants, delta: float
) -> ConstructionParams:
    """Size all construction knobs from the growth constants.

    The distance cutoff comes from three geometric-series majorants: the
    shifted-arc mass must stay under ``delta/25`` of each node's depth,
    and the two tail families (box/far and cone) must each stay under
    ``delta/3``.  The cone majorant has the weakest decay rate and
    dominates by orders of magnitude.
    """
    from .classify import check_condition

    if not check_condition(seq, "a", constants).passed:
        raise ConstructionError(
            "sequence fails the counting condition at the supplied constants"
        )
    if not (0 < delta < 1):
        raise ConstructionError(f"delta must lie in (0,1), got {delta!r}")
    alpha, m_const = constants.alpha, constants.m_const
    m0 = fit_m0(seq, delta)
    lam = delta / 25
    c = box_comparability_constant(m0)
    gamma = (1 - alpha) / (2 * c)  # alpha + c*gamma = (1+alpha)/2 < 1
    eta = min((1 - alpha) / 2, gamma / (2 * c)) / 2

    rate1 = alpha + c * gamma - 1
    coef1 = m_const * 2.0 ** (c * (1 - c * gamma)) / (1 - 2.0 ** rate1)
    n1 = _size_from_majorant(coef1, rate1, lam)

    rate2 = eta + alpha - 1
    coef2 = max(2 * m0 * 2.0 ** c, 16 * m0) * m_const / (1 - 2.0 ** rate2)
    n2 = _size_from_majorant(coef2, rate2, delta / 3)

    rate3 = eta - gamma / c
    coef3 = 2.0 * _stolz_layer_count(seq, m0) * 2.0 ** gamma / (1 - 2.0 ** rate3)
    n3 = _size_from_majorant(coef3, rate3, delta / 3)

    params = ConstructionParams(
        delta=delta, m0=m0, gamma=gamma, cap_n=max(n1, n2, n3), eta=eta
    )
    if not params.admissible_for(alpha):  # pragma: no cover - formulas ensure it
        raise ConstructionError("parameter formulas produced an inadmissible set")
    return params


def _far_deep_indices(
    pts: Sequence[DiscPoint], beta: np.ndarray, k: int, params: ConstructionParams
) -> List[int]:
    """Nodes at least as far out as node k, beyond the distance cutoff,
    inside node k's 20*m0-scaled box."""
    box = CarlesonBox.over(pts[k], 20 * params.m0)
    out = []
    for n in range(len(pts)):
        if n == k or pts[n].depth > pts[k].depth:
            continue
        if beta[k, n] >= params.cap_n and box.contains(pts[n]):
            out.append(n)
    return out


def build_e_sets(seq: PointSequence, params: ConstructionParams) -> List[ArcSet]:
    """Dilated node arcs, minus the arcs of inward-shifted far nodes.

    Each node keeps harmonic measure at least ``1 - delta/10`` of its set;
    a violation is raised with the offending node and the measured value
    (it means the parameters were sized wrong, not that the input is bad).
    """
    pts = _float_points(seq)
    beta = pairwise_beta(seq)
    out: List[ArcSet] = []
    floor = 1 - params.delta / 10
    for k, zk in enumerate(pts):
        e = base_arc(zk, params.m0)
        for n in _far_deep_indices(pts, beta, k, params):
            shifted = shifted_point(zk, pts[n], params.gamma, owner=k, index=n)
            e = e.difference(base_arc(shifted.point, 1.0))
        got = harmonic_measure_arc(zk, e)
        if got < floor:
            raise ConstructionError(
                f"node {k}: kept measure {got:.6f} < {floor:.6f} after carving"
            )
        out.append(e)
    return out


def build_gn(seq: PointSequence, params: ConstructionParams) -> GnFamily:
    """Stopping-time recursion over nodes in decreasing depth order.

    The first node keeps its whole E-set.  A later node whose near
    cluster (distance ``<= cap_n``) already covers it to measure
    ``1 - delta`` contributes nothing; otherwise it keeps its E-set minus
    everything already taken.  Subtracting *all* earlier sets (not only
    the near ones) is how the theory's disjointness claim is made
    structural — when the parameters are sized properly the extra
    subtraction removes nothing.
    """
    pts = _float_points(seq)
    d = len(pts)
    beta = pairwise_beta(seq)
    e_sets = build_e_sets(seq, params)
    order = sorted(
        range(d), key=lambda i: (-float(pts[i].depth), float(pts[i].theta), i)
    )
    g_sets: List[Optional[ArcSet]] = [None] * d
    for pos, j in enumerate(order):
        prev = order[:pos]
        if not prev:
            g_sets[j] = e_sets[j]
            continue
        taken = ArcSet.empty()
        for k in prev:
            taken = taken.union(g_sets[k])
        near = [k for k in prev if beta[j, k] <= params.cap_n]
        if near:
            near_union = ArcSet.empty()
            for k in near:
                near_union = near_union.union(g_sets[k])
            if harmonic_measure_arc(pts[j], near_union) >= 1 - params.delta:
                g_sets[j] = ArcSet.empty()
                continue
        g_sets[j] = e_sets[j].difference(taken)
    neighbors = tuple(
        tuple(k for k in range(d) if beta[n, k] <= params.cap_n) for n in range(d)
    )
    fam = GnFamily(
        g_sets=tuple(g_sets),
        e_sets=tuple(e_sets),
        neighbors=neighbors,
        params=params,
    )
    fam.validate(seq)
    return fam


def verify_estimates(
    fam: GnFamily, seq: PointSequence
) -> Tuple[np.ndarray, np.ndarray]:
    """Coverage margins and weighted tail sums, both from exact arcs.

    ``cover_margin[n]`` is how far the near-cluster union exceeds the
    required measure ``1 - delta`` at node n (negative = violation);
    ``tail_sum[n]`` weights each far node's set by ``2^(eta * distance)``
    and must stay below ``delta``.
    """
    pts = _float_points(seq)
    beta = pairwise_beta(seq)
    d = len(pts)
    margins = np.empty(d)
    tails = np.empty(d)
    for n in range(d):
        hood = ArcSet.empty()
        for k in fam.neighbors[n]:
            hood = hood.union(fam.g_sets[k])
        margins[n] = harmonic_measure_arc(pts[n], hood) - (1 - fam.params.delta)
        tail = 0.0
        for k in range(d):
            if k in fam.neighbors[n]:
                continue
            w = harmonic_measure_arc(pts[n], fam.g_sets[k])
            tail += 2.0 ** (fam.params.eta * beta[n, k]) * w
        tails[n] = tail
    return margins, tails


def solve_hinfty_partition(
    seq: PointSequence,
    partition: Sequence[bool],
    grid: Optional[GridSpec] = None,
    tolerance: float = 1e-9,
) -> Tuple[np.ndarray, float]:
    """Bounded boundary density separating the two sides of a partition.

    Finds ``h`` with values in [-1, 1] on the grid cells and the largest
    level ``gamma`` such that the harmonic extension of ``h`` is at least
    ``gamma`` at T-nodes and at most ``-gamma`` at S-nodes.  Cell weights
    are exact harmonic measures, so the returned level is a faithful
    property of the grid, not of a quadrature.
    """
    pts = _float_points(seq)
    mask = np.array(list(partition), dtype=bool)
    if len(mask) != len(pts):
        raise ConstructionError("partition length must match the sequence")
    grid = grid or GridSpec.for_sequence(pts, resolution=2048)
    angles = grid.angles()
    cells = grid.voronoi_cells(angles)
    omega = np.array(
        [[harmonic_measure_arc(z, cell) for cell in cells] for z in pts]
    )
    h, gamma = lp.hinfty_level(omega, mask)
    if gamma <= tolerance:
        raise ResolutionError(
            f"separation level {gamma:.3e} at {len(angles)} angles; "
            f"retry with a refined grid (e.g. {2 * len(angles)} angles)"
        )
    return h, gamma


def assemble_u(
    seq: PointSequence,
    values: Sequence[float],
    fam: GnFamily,
    h: np.ndarray,
    grid: Optional[GridSpec] = None,
) -> BoundaryMeasure:
    """Atomic discretisation of ``sum_k w_k (1 + h) 1_{G_k} dtheta/2pi``.

    Each grid cell contributes an atom at its grid angle with mass
    ``w_k (1 + h) |cell ∩ G_k| / 2pi`` — the exact-arc quadrature of the
    defining integral.  Since ``|h| <= 1`` the masses are nonnegative.
    """
    pts = _float_points(seq)
    w = [float(v) for v in values]
    if len(w) != len(pts):
        raise ConstructionError("values length must match the sequence")
    if any(v <= 0 for v in w):
        raise ConstructionError("values must be positive")
    grid = grid or GridSpec.for_sequence(pts, resolution=2048)
    angles = grid.angles()
    if len(h) != len(angles):
        raise ConstructionError("density length must match the grid")
    cells = grid.voronoi_cells(angles)
    masses = np.zeros(len(angles))
    two_pi = 2 * math.pi
    for k, g_k in enumerate(fam.g_sets):
        if not g_k.pieces:
            continue
        for g, cell in enumerate(cells):
            part = cell.intersection(g_k).measure
            if part > 0:
                masses[g] += w[k] * (1.0 + float(h[g])) * part / two_pi
    keep = masses > 0
    return BoundaryMeasure(angles[keep], masses[keep])
