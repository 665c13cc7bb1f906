"""Density classifiers for point sequences in the disc.

Four mutually related growth conditions are checked, all parametrised by
an exponent ``alpha`` in (0, 1) and a constant ``M >= 1``:

``a``  counting in hyperbolic balls: ``#{m : beta(z_n, z_m) <= l} <= M 2^(alpha l)``
       for every point ``z_n`` and integer radius ``l >= 0``;
``b``  the same with pseudo-hyperbolic balls of any radius ``r``, with
       bound ``M ((1+r)/(1-r))^alpha``;
``c``  dyadic depth layers inside the boundary box of each point:
       layer ``j`` (members with ``2^-(j+1) < depth ratio <= 2^-j``) holds
       at most ``M 2^(alpha j)`` points;
``d``  power sums inside the box: ``sum (s_m/s_n)^alpha <= M``.

Conditions (a) and (b) are equivalent up to a factor ``2^alpha``; (a)
implies (c) with a computable constant because box members sit within a
bounded hyperbolic distance of the vertex once depths are matched; (c) and
(d) convert into each other by summing the dyadic layers — see
:func:`implied_constant` for the exact factors, which the test suite
verifies empirically on the whole gallery.

Internally every check works in beta-space (base-2 hyperbolic distance):
this stays numerically faithful even for sequences so deep that the
pseudo-hyperbolic distance rounds to 1.0 in floats.  Sequences whose
coordinates are ``mpmath.mpf`` are classified with exact multiprecision
pairwise distances (cast to float64 only after the subtraction structure
is resolved).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .disc import (
    DiscPoint,
    beta_depth_bound,
    circular_distance,
    hyperbolic_distance,
)

__all__ = [
    "PointSequence",
    "DensityConstants",
    "ConditionResult",
    "ClassificationReport",
    "ClassifierError",
    "pairwise_beta",
    "check_condition",
    "fit_condition",
    "fit_m",
    "check_separation",
    "fit_carleson_intensity",
    "implied_constant",
    "classify_sequence",
    "CONDITION_NAMES",
]

_LN2 = math.log(2.0)
_COUNT_SLACK = 1e-9  # absolute slack in beta when counting "within radius l"
_BOX_BOUND = beta_depth_bound(1.0)  # distance budget inside a unit box

CONDITION_NAMES = ("a", "b", "c", "d")


class ClassifierError(ValueError):
    """Raised for malformed sequences or classifier parameters."""


@dataclass(frozen=True)
class PointSequence:
    """Finite tuple of distinct disc points, optionally labelled.

    ``workprec``: if the coordinates are mpf, the binary precision the
    sequence was generated at (pairwise distances are evaluated at least
    at this precision).  0 means plain float coordinates.
    """

    points: Tuple[DiscPoint, ...]
    label: str = ""
    workprec: int = 0

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ClassifierError("sequence must contain at least one point")
        seen = set()
        for i, p in enumerate(pts):
            key = (p.theta, p.depth)
            if key in seen:
                raise ClassifierError(f"duplicate point at index {i}: {p}")
            seen.add(key)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[DiscPoint]:
        return iter(self.points)

    def __getitem__(self, i: int) -> DiscPoint:
        return self.points[i]

    def union(self, other: "PointSequence", label: str = "") -> "PointSequence":
        return PointSequence(
            self.points + other.points,
            label or f"{self.label}|{other.label}",
            max(self.workprec, other.workprec),
        )

    def subsequence(self, indices: Iterable[int], label: str = "") -> "PointSequence":
        return PointSequence(
            tuple(self.points[i] for i in indices), label or self.label, self.workprec
        )

    def by_decreasing_depth(self) -> List[int]:
        """Indices ordered deepest-first (ties broken by index)."""
        return sorted(range(len(self.points)), key=lambda i: (-float(self.points[i].depth), i))

    def is_float(self) -> bool:
        return not any(
            isinstance(p.theta, mpmath.mpf) or isinstance(p.depth, mpmath.mpf)
            for p in self.points
        )


@dataclass(frozen=True)
class DensityConstants:
    """Exponent/constant pair for the growth conditions."""

    alpha: float
    m_const: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ClassifierError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.m_const < 1.0:
            raise ClassifierError(f"M must be >= 1, got {self.m_const}")


@dataclass(frozen=True)
class ConditionResult:
    name: str
    passed: bool
    fitted: float
    witness: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> Dict:
        return {
            "condition": self.name,
            "passed": self.passed,
            "fitted": self.fitted,
            "witness": dict(self.witness),
        }


@dataclass(frozen=True)
class ClassificationReport:
    label: str
    constants: Optional[DensityConstants]
    results: Tuple[ConditionResult, ...]

    def result(self, name: str) -> ConditionResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self) -> Dict:
        return {
            "label": self.label,
            "alpha": self.constants.alpha if self.constants else None,
            "m_const": self.constants.m_const if self.constants else None,
            "results": [r.as_dict() for r in self.results],
        }


# --------------------------------------------------------------------------
# pairwise distances


def _float_coords(seq: PointSequence) -> Tuple[np.ndarray, np.ndarray]:
    th = np.array([float(p.theta) for p in seq.points])
    s = np.array([float(p.depth) for p in seq.points])
    return th, s


def _beta_block_float(th: np.ndarray, s: np.ndarray, lg: np.ndarray, i0: int, i1: int) -> np.ndarray:
    """Rows [i0, i1) of the beta matrix, vectorised (float sequences)."""
    ti, si, gi = th[i0:i1, None], s[i0:i1, None], lg[i0:i1, None]
    q = 4.0 * (1.0 - si) * (1.0 - s[None, :]) * np.sin(0.5 * (ti - th[None, :])) ** 2
    a2 = (si - s[None, :]) ** 2 + q
    b2 = (si + s[None, :] - si * s[None, :]) ** 2 + q
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.sqrt(a2 / b2)
        beta = (2.0 * np.log1p(rho) + np.log(b2) - gi - lg[None, :]) / _LN2
    beta[a2 == 0.0] = 0.0
    np.maximum(beta, 0.0, out=beta)
    return beta


def _pairwise_mpf(seq: PointSequence) -> np.ndarray:
    """Dense matrix via multiprecision distances (deep sequences)."""
    n = len(seq)
    prec = max(seq.workprec, mpmath.mp.prec)
    full = np.zeros((n, n))
    pts = seq.points
    with mpmath.workprec(prec):
        for i in range(n):
            for j in range(i + 1, n):
                full[i, j] = full[j, i] = float(hyperbolic_distance(pts[i], pts[j]))
    return full


def _beta_blocks(seq: PointSequence, block: int = 512) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield ``(row_offset, rows)`` of the pairwise beta matrix.

    Float sequences stream (nothing dense is kept); mpf sequences go
    through the cached dense matrix, which is the expensive object.
    """
    n = len(seq)
    if seq.is_float():
        th, s = _float_coords(seq)
        lg = np.log(s) + np.log(2.0 - s)
        for i0 in range(0, n, block):
            yield i0, _beta_block_float(th, s, lg, i0, min(n, i0 + block))
        return
    full = pairwise_beta(seq)
    for i0 in range(0, n, block):
        yield i0, full[i0 : min(n, i0 + block)]


@functools.lru_cache(maxsize=8)
def pairwise_beta(seq: PointSequence) -> np.ndarray:
    """Full symmetric beta matrix (cached; read-only view)."""
    n = len(seq)
    if n > 4096:
        raise ClassifierError(
            f"sequence of {n} points is too large for a dense distance matrix; "
            "the condition checkers stream blocks instead"
        )
    if seq.is_float():
        th, s = _float_coords(seq)
        lg = np.log(s) + np.log(2.0 - s)
        out = np.vstack(
            [_beta_block_float(th, s, lg, i0, min(n, i0 + 512)) for i0 in range(0, n, 512)]
        )
    else:
        out = _pairwise_mpf(seq)
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# conditions (a) and (b): counting in balls


def _scan_counting(seq: PointSequence, alpha: float, integer_radii: bool):
    """Worst ratio count / 2^(alpha x) over ball radii x.

    ``integer_radii`` selects condition (a) (x = 0, 1, 2, ...); otherwise
    the attained pairwise distances are used (condition (b), expressed in
    beta-space where the bound reads ``M 2^(alpha x)``).
    """
    worst = 0.0
    witness: Dict[str, float] = {}
    for i0, rows in _beta_blocks(seq):
        for r in range(rows.shape[0]):
            row = np.sort(rows[r])
            if integer_radii:
                radii = np.arange(0.0, math.floor(row[-1]) + 2.0)
                counts = np.searchsorted(row, radii + _COUNT_SLACK, side="right")
            else:
                radii = row
                counts = np.searchsorted(row, radii, side="right")
            ratios = counts / np.exp2(alpha * radii)
            k = int(np.argmax(ratios))
            if ratios[k] > worst:
                worst = float(ratios[k])
                witness = {
                    "point_index": float(i0 + r),
                    "radius": float(radii[k]),
                    "count": float(counts[k]),
                }
    return worst, witness


# --------------------------------------------------------------------------
# conditions (c) and (d): boxes and dyadic layers


@functools.lru_cache(maxsize=8)
def _box_ratio_table(seq: PointSequence) -> Tuple[np.ndarray, ...]:
    """Per point: depth ratios ``s_m / s_n`` over members of the box of
    ``z_n`` (alpha-independent, so cached for the layer/power-sum scans)."""
    if seq.is_float():
        th, s = _float_coords(seq)
        table = []
        for n in range(len(seq)):
            dist = np.abs((th - th[n] + math.pi) % (2.0 * math.pi) - math.pi)
            mask = (s <= s[n]) & (dist <= math.pi * s[n])
            table.append(s[mask] / s[n])
        return tuple(table)
    prec = max(seq.workprec, mpmath.mp.prec)
    table = []
    with mpmath.workprec(prec):
        for zn in seq.points:
            sn = zn.depth
            out = [
                float(p.depth / sn)
                for p in seq.points
                if p.depth <= sn and circular_distance(p.theta, zn.theta) <= mpmath.pi * sn
            ]
            table.append(np.array(out))
    return tuple(table)


def _box_members(seq: PointSequence, n: int) -> np.ndarray:
    return _box_ratio_table(seq)[n]


def _scan_layers(seq: PointSequence, alpha: float):
    """Condition (c): worst layer count ratio over all boxes."""
    worst, witness = 0.0, {}
    for n in range(len(seq)):
        ratios = _box_members(seq, n)
        j = np.floor(-np.log2(ratios) + 1e-12).astype(int)
        counts = np.bincount(j)
        levels = np.arange(len(counts))
        vals = counts / np.exp2(alpha * levels)
        k = int(np.argmax(vals))
        if vals[k] > worst:
            worst = float(vals[k])
            witness = {"point_index": float(n), "layer": float(k), "count": float(counts[k])}
    return worst, witness


def _scan_power_sums(seq: PointSequence, alpha: float):
    """Condition (d): worst box power sum."""
    worst, witness = 0.0, {}
    for n in range(len(seq)):
        ratios = _box_members(seq, n)
        total = float(np.sum(ratios ** alpha))
        if total > worst:
            worst = total
            witness = {"point_index": float(n), "sum": total}
    return worst, witness


# --------------------------------------------------------------------------
# public checkers


def fit_condition(seq: PointSequence, condition: str, alpha: float) -> Tuple[float, Dict]:
    """Minimal constant M for which the condition holds at this exponent.

    ``alpha`` up to and including 1.0 is accepted here (useful for
    diagnostics at the critical exponent), even though
    :class:`DensityConstants` restricts to the open interval.
    """
    if not (0.0 < alpha <= 1.0):
        raise ClassifierError(f"alpha must lie in (0, 1], got {alpha}")
    if condition == "a":
        return _scan_counting(seq, alpha, integer_radii=True)
    if condition == "b":
        return _scan_counting(seq, alpha, integer_radii=False)
    if condition == "c":
        return _scan_layers(seq, alpha)
    if condition == "d":
        return _scan_power_sums(seq, alpha)
    raise ClassifierError(f"unknown condition {condition!r}; pick one of {CONDITION_NAMES}")


def fit_m(seq: PointSequence, alpha: float, condition: str = "a") -> float:
    fitted, _ = fit_condition(seq, condition, alpha)
    return fitted


def check_condition(
    seq: PointSequence, condition: str, constants: DensityConstants
) -> ConditionResult:
    fitted, witness = fit_condition(seq, condition, constants.alpha)
    passed = fitted <= constants.m_const * (1.0 + 1e-12)
    return ConditionResult(condition, passed, fitted, witness)


def check_separation(seq: PointSequence) -> ConditionResult:
    """Minimal pairwise distance; a sequence is separated when it is > 0."""
    if len(seq) == 1:
        return ConditionResult("separation", True, math.inf, {})
    best = math.inf
    witness: Dict[str, float] = {}
    for i0, rows in _beta_blocks(seq):
        r = rows.copy()
        for k in range(r.shape[0]):
            r[k, i0 + k] = math.inf
        flat = int(np.argmin(r))
        i, j = divmod(flat, r.shape[1])
        if r[i, j] < best:
            best = float(r[i, j])
            witness = {"index_a": float(i0 + i), "index_b": float(j)}
    return ConditionResult("separation", best > 0.0, best, witness)


def fit_carleson_intensity(seq: PointSequence) -> Tuple[float, Dict]:
    """Smallest C with ``sum over box of depths <= C * size`` for all boxes.

    Candidate boxes: each point's own box, its doubled box, and the whole
    disc; the maximiser over these witnesses the Carleson intensity at the
    scales the constructions below actually use.
    """
    pts = seq.points
    mp_mode = not seq.is_float()
    prec = max(seq.workprec, mpmath.mp.prec)
    th_s: Sequence = pts
    worst, witness = 0.0, {}

    def norm_for(center_theta, size) -> float:
        if mp_mode:
            with mpmath.workprec(prec):
                tot = mpmath.mpf(0)
                for p in th_s:
                    if p.depth <= size and (
                        size >= 1
                        or circular_distance(p.theta, center_theta) <= mpmath.pi * size
                    ):
                        tot += p.depth
                return float(tot / size)
        th, s = _float_coords(seq)
        dist = np.abs((th - float(center_theta) + math.pi) % (2 * math.pi) - math.pi)
        mask = (s <= float(size)) & (dist <= math.pi * float(size))
        return float(s[mask].sum() / float(size))

    candidates = [(p.theta, p.depth) for p in pts]
    candidates += [(p.theta, min(1.0, 2 * p.depth) if not mp_mode else p.depth * 2) for p in pts]
    candidates.append((0.0, 1.0))
    for center, size in candidates:
        if size > 1:
            size = 1.0
        val = norm_for(center, size)
        if val > worst:
            worst = val
            witness = {"center": float(center), "size": float(size), "intensity": val}
    return worst, witness


def classify_sequence(
    seq: PointSequence,
    constants: Optional[DensityConstants] = None,
    conditions: Sequence[str] = CONDITION_NAMES,
) -> ClassificationReport:
    """Run the requested condition checks plus separation and Carleson
    intensity; without constants, report fitted values only."""
    results: List[ConditionResult] = []
    for name in conditions:
        if constants is not None:
            results.append(check_condition(seq, name, constants))
        else:
            fitted, witness = fit_condition(seq, name, 0.5)
            results.append(ConditionResult(name, True, fitted, witness))
    results.append(check_separation(seq))
    carleson, cw = fit_carleson_intensity(seq)
    results.append(ConditionResult("carleson", True, carleson, cw))
    return ClassificationReport(seq.label, constants, tuple(results))


# --------------------------------------------------------------------------
# provable conversions between the conditions


def implied_constant(source: str, target: str, m: float, alpha: float) -> Tuple[float, float]:
    """Constant/exponent for ``target`` provable from ``source`` at (m, alpha).

    Returns ``(m_target, alpha_target)``.  Derivations:

    - a -> b: a ball of real radius x sits inside the integer ball
      ``ceil(x)``, costing ``2^alpha``.
    - b -> a: specialisation (same constant).
    - a -> c: a box member at depth layer j is within hyperbolic distance
      ``(j+1) + B`` of the vertex, ``B = beta_depth_bound(1)``; rounding
      the radius up to the integer ``j + 8`` gives ``M 2^(8 alpha)``.
    - c -> d at exponent ``alpha' = (1+alpha)/2``: sum the layers,
      ``sum_j M 2^(alpha j) 2^(-alpha' j)`` is a geometric series.
    - d -> c (same exponent): a layer-j member contributes at least
      ``2^(-alpha(j+1))`` to the power sum.
    """
    key = (source, target)
    if key == ("a", "b"):
        return m * 2.0 ** alpha, alpha
    if key == ("b", "a"):
        return m, alpha
    if key == ("a", "c"):
        steps = math.ceil(1.0 + _BOX_BOUND)  # = 8 with the unit-box budget
        return m * 2.0 ** (steps * alpha), alpha
    if key == ("c", "d"):
        alpha_t = 0.5 * (1.0 + alpha)
        return m / (1.0 - 2.0 ** (alpha - alpha_t)), alpha_t
    if key == ("d", "c"):
        return m * 2.0 ** alpha, alpha
    raise ClassifierError(f"no derived conversion for {source} -> {target}")
