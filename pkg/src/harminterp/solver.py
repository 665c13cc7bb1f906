"""Feasibility solver: prescribe positive values at disc nodes, decide
whether some positive harmonic function attains them.

Every positive harmonic function on the disc is the Poisson integral of a
nonnegative boundary measure, so the finite prescription problem becomes a
linear-programming question over atomic measures on an angle grid.  Two
independent routes decide it:

* :func:`solve_direct` -- equality form with slack minimisation; an
  infeasible verdict carries a per-node Farkas vector whose sign pattern
  already names a hard node partition.
* :func:`solve_by_partitions` -- for every split of the nodes into an
  "at least" side and an "at most" side, ask whether one-sided matching is
  possible.  The direct problem is solvable exactly when every partition
  is, which makes this an oracle for the first route (and vice versa).

Verdicts refer to the chosen grid.  A too-coarse grid can turn a feasible
deep-node problem infeasible; callers refine and retry (the CLI does this
automatically once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import lp
from .classify import PointSequence, pairwise_beta
from .disc import DiscPoint
from .measure import BoundaryMeasure, GridSpec, poisson_matrix

__all__ = [
    "SolverError",
    "InterpolationProblem",
    "InterpolationResult",
    "OneSidedProblem",
    "PairWitness",
    "CompatCheck",
    "check_compatibility",
    "generate_compatible_values",
    "default_grid",
    "solve_direct",
    "solve_one_sided",
    "solve_by_partitions",
    "epsilon_profile",
    "PARTITION_NODE_CAP",
]

PARTITION_NODE_CAP = 20
_SOLVER_RESOLUTION = 2048
_LEVEL_SLACK = 1e-7  # relative shortfall tolerated by the one-sided route


class SolverError(ValueError):
    """Bad solver input (mismatched lengths, out-of-range parameters...)."""


class PairWitness(NamedTuple):
    first: int
    second: int
    ratio: float


class CompatCheck(NamedTuple):
    ok: bool
    worst_pair: Optional[PairWitness]


@dataclass(frozen=True)
class InterpolationProblem:
    """Node sequence plus the positive values to hit there.

    ``epsilon`` is the compatibility-budget parameter: values are meant to
    obey ``|log2 w_n - log2 w_m| <= epsilon * beta(z_n, z_m)``.  It shapes
    value generation and the compatibility check; the LP itself only sees
    the values.  ``tolerance`` is the relative equality tolerance of the
    feasibility verdict.
    """

    sequence: PointSequence
    values: Tuple[float, ...]
    epsilon: float = 0.1
    tolerance: float = 1e-8

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(self.sequence):
            raise SolverError(
                f"{len(vals)} values for {len(self.sequence)} nodes"
            )
        if not vals:
            raise SolverError("empty problem")
        if any(not math.isfinite(v) or v <= 0 for v in vals):
            raise SolverError("values must be positive and finite")
        if not (0 < self.epsilon <= 1):
            raise SolverError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        if not (0 < self.tolerance <= 1e-3):
            raise SolverError(
                f"tolerance must lie in (0, 1e-3], got {self.tolerance!r}"
            )
        object.__setattr__(self, "values", vals)

    @property
    def value_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


@dataclass(frozen=True)
class InterpolationResult:
    """Verdict for one grid.

    Feasible: ``measure`` is an atomic boundary measure whose Poisson
    integral matches the values; ``residuals`` are per-node relative errors
    recomputed from the measure itself (not read off the LP).

    Infeasible: ``certificate`` is a per-node vector ``x`` with
    ``<x, values> > 0`` while ``<x, kernel column> <= 0`` at every grid
    angle — no nonnegative measure on this grid can match.  The sign split
    ``T = {n : x_n >= 0}`` names a partition on which one-sided matching
    already fails.  ``certified`` records whether the sign conditions were
    verified in exact rational arithmetic.
    """

    status: str
    grid_size: int
    slack_total: float
    slack_budget: float
    measure: Optional[BoundaryMeasure] = None
    certificate: Optional[np.ndarray] = None
    residuals: Optional[np.ndarray] = None
    certified: bool = False

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def upper_partition(self) -> Tuple[int, ...]:
        if self.certificate is None:
            raise SolverError("no certificate on a feasible result")
        return tuple(int(i) for i in np.flatnonzero(self.certificate >= 0))


@dataclass(frozen=True)
class OneSidedProblem:
    """Values with a side marker per node: ``"T"`` nodes must be met or
    exceeded, ``"S"`` nodes must not be exceeded."""

    sequence: PointSequence
    values: Tuple[float, ...]
    sides: Tuple[str, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(self.sequence) or len(self.sides) != len(vals):
            raise SolverError("sequence, values and sides must align")
        if any(s not in ("T", "S") for s in self.sides):
            raise SolverError("sides must be 'T' or 'S'")
        if any(v <= 0 for v in vals):
            raise SolverError("values must be positive")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mask(
        cls,
        sequence: PointSequence,
        values: Sequence[float],
        upper_mask: Sequence[bool],
    ) -> "OneSidedProblem":
        sides = tuple("T" if b else "S" for b in upper_mask)
        return cls(sequence, tuple(values), sides)

    @property
    def upper_mask(self) -> np.ndarray:
        return np.array([s == "T" for s in self.sides], dtype=bool)


def default_grid(sequence: PointSequence) -> GridSpec:
    """Solver default: 2048 base angles plus dyadic offsets at each node."""
    return GridSpec.for_sequence(sequence.points, resolution=_SOLVER_RESOLUTION)


def check_compatibility(problem: InterpolationProblem) -> CompatCheck:
    """Pairwise value-compatibility check.

    Compares ``|log2 w_n - log2 w_m|`` against ``epsilon * beta`` for all
    pairs, with a hair of slack for rounding; the reported witness is the
    pair with the largest ratio whether or not the check passes.
    """
    beta = pairwise_beta(problem.sequence)
    logs = np.log2(problem.value_array)
    d = len(logs)
    worst: Optional[PairWitness] = None
    for n in range(d):
        for m in range(n + 1, d):
            bound = problem.epsilon * beta[n, m]
            gap = abs(logs[n] - logs[m])
            ratio = gap / bound if bound > 0 else math.inf
            if worst is None or ratio > worst.ratio:
                worst = PairWitness(n, m, ratio)
    ok = worst is None or worst.ratio <= 1 + 1e-9
    return CompatCheck(ok, worst)


def generate_compatible_values(
    sequence: PointSequence,
    epsilon: float,
    seed: int = 0,
) -> np.ndarray:
    """Sample values that always pass the compatibility check.

    Takes ``w_n = 2^(epsilon * L(n))`` with
    ``L(n) = min_m (c_m + beta(z_n, z_m))`` for seeded random offsets
    ``c_m``; the minimum of 1-Lipschitz functions is 1-Lipschitz, so the
    log-differences obey the ``epsilon * beta`` budget by construction.
    """
    if not (0 < epsilon <= 1):
        raise SolverError(f"epsilon must lie in (0, 1], got {epsilon!r}")
    beta = pairwise_beta(sequence)
    rng = np.random.default_rng(seed)
    span = float(beta.max()) + 1.0
    offsets = rng.uniform(0.0, span, size=len(sequence))
    levels = (offsets[None, :] + beta).min(axis=1)
    return np.exp2(epsilon * levels)


def _float_points(sequence: PointSequence) -> List[DiscPoint]:
    if sequence.is_float():
        return list(sequence.points)
    return [DiscPoint(float(p.theta), float(p.depth)) for p in sequence.points]


def solve_direct(
    problem: InterpolationProblem,
    grid: Optional[GridSpec] = None,
) -> InterpolationResult:
    """Equality-form feasibility on a grid.

    Minimises the total absolute slack in ``K m = w`` over nonnegative
    grid masses; the problem is declared feasible when the optimum lands
    within ``tolerance * sum(w)``.  On the infeasible side the LP dual is
    returned as the certificate after an exact-arithmetic polish; if the
    float dual resists polishing and the problem is small, an exact
    rational simplex recomputes it.
    """
    grid = grid or default_grid(problem.sequence)
    points = _float_points(problem.sequence)
    angles = grid.angles()
    kernel = poisson_matrix(points, angles)
    w = problem.value_array
    sol = lp.min_total_slack(kernel, w)
    budget = problem.tolerance * float(w.sum())

    if sol.optimum <= budget:
        keep = sol.masses > 0
        measure = BoundaryMeasure(angles[keep], sol.masses[keep])
        evals = np.array([measure.poisson_eval(z) for z in points])
        residuals = (evals - w) / w
        return InterpolationResult(
            status="feasible",
            grid_size=len(angles),
            slack_total=sol.optimum,
            slack_budget=budget,
            measure=measure,
            residuals=residuals,
        )

    x, certified = lp.polish_certificate(kernel, w, sol.dual)
    if not certified and len(points) <= 12:
        exact = lp.exact_min_slack(kernel, w)
        if float(exact.optimum) > budget:
            x_exact = np.array([float(v) for v in exact.dual])
            x2, ok2 = lp.polish_certificate(kernel, w, x_exact)
            if ok2:
                x, certified = x2, True
    return InterpolationResult(
        status="infeasible",
        grid_size=len(angles),
        slack_total=sol.optimum,
        slack_budget=budget,
        certificate=x,
        certified=certified,
    )


def solve_one_sided(
    problem: OneSidedProblem,
    grid: Optional[GridSpec] = None,
    level_slack: float = _LEVEL_SLACK,
) -> Tuple[bool, float]:
    """Decide one partition: can some nonnegative grid measure sit at or
    above the values on the T side without exceeding them on the S side?

    Returns ``(feasible, level)`` where ``level`` is the best T-side
    coverage fraction; 1 means exact one-sided matching.
    """
    grid = grid or default_grid(problem.sequence)
    points = _float_points(problem.sequence)
    kernel = poisson_matrix(points, grid.angles())
    w = np.array(problem.values, dtype=float)
    mask = problem.upper_mask
    if not mask.any():
        return True, 2.0  # the zero measure stays below everything
    level = lp.one_sided_level(kernel, w, mask)
    return level >= 1 - level_slack, level


class PartitionVerdict(NamedTuple):
    feasible: bool
    failing_partition: Optional[Tuple[int, ...]]


def solve_by_partitions(
    problem: InterpolationProblem,
    grid: Optional[GridSpec] = None,
) -> PartitionVerdict:
    """Partition oracle: the equality problem is feasible exactly when
    every node split admits a one-sided solution.

    Walks all ``2^d`` splits (the all-S split is trivially solvable by the
    zero measure and is skipped).  Exponential by nature — refuses more
    than ``PARTITION_NODE_CAP`` nodes.
    """
    d = len(problem.sequence)
    if d > PARTITION_NODE_CAP:
        raise SolverError(
            f"partition sweep needs 2^{d} LPs; cap is {PARTITION_NODE_CAP} nodes"
        )
    grid = grid or default_grid(problem.sequence)
    points = _float_points(problem.sequence)
    kernel = poisson_matrix(points, grid.angles())
    w = problem.value_array
    for bits in range(1, 2 ** d):
        mask = np.array([(bits >> n) & 1 == 1 for n in range(d)])
        level = lp.one_sided_level(kernel, w, mask)
        if level < 1 - _LEVEL_SLACK:
            return PartitionVerdict(
                False, tuple(int(i) for i in np.flatnonzero(mask))
            )
    return PartitionVerdict(True, None)


class ProfilePoint(NamedTuple):
    epsilon: float
    success_rate: float
    trials: int


def epsilon_profile(
    sequence: PointSequence,
    epsilons: Sequence[float],
    trials: int = 20,
    seed: int = 0,
    grid: Optional[GridSpec] = None,
    tolerance: float = 1e-8,
) -> List[ProfilePoint]:
    """Feasibility rate of seeded compatible problems per epsilon.

    The crossover where rates fall from 1 locates the sequence's
    interpolation budget empirically.
    """
    grid = grid or default_grid(sequence)
    out: List[ProfilePoint] = []
    for eps in epsilons:
        hits = 0
        for t in range(trials):
            values = generate_compatible_values(
                sequence, eps, seed=seed + 7919 * t
            )
            prob = InterpolationProblem(
                sequence, tuple(values), epsilon=eps, tolerance=tolerance
            )
            if solve_direct(prob, grid).feasible:
                hits += 1
        out.append(ProfilePoint(float(eps), hits / trials, trials))
    return out
