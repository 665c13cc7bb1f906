"""Zero-free bounded analytic functions with prescribed moduli.

Hitting ``|f(z_n)| = m_n`` with a bounded, nowhere-vanishing analytic
``f`` reduces to positive harmonic interpolation: solve
``u(z_n) = log(cap_c / m_n)`` for ``u >= 0`` and exponentiate,

    f = cap_c * exp(-(u + i * conj_u)),

with ``conj_u`` the harmonic conjugate normalised to vanish at the
origin.  Then ``|f| = cap_c * e^{-u} <= cap_c`` everywhere, ``f`` has no
zeros, and ``|f(z_n)| = m_n`` up to solver tolerance.  The admissibility
condition on the moduli is exactly value-compatibility of the logs
``log(cap_c/m_n)`` — a pairwise double-logarithm spacing bound.

Only moduli are interpolated here.  Matching prescribed *phases* as well
needs an analytic interpolation step this package does not attempt; the
report exposes the achieved phases so the gap is visible.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .classify import PointSequence, pairwise_beta
from .disc import DiscPoint
from .measure import BoundaryMeasure, GridSpec
from .solver import (
    CompatCheck,
    InterpolationProblem,
    InterpolationResult,
    PairWitness,
    solve_direct,
)

__all__ = [
    "ModulusError",
    "ModulusProblem",
    "ModulusInterpolant",
    "check_loglog_compat",
    "conjugate_at",
    "construct_modulus_interpolant",
    "cauchy_riemann_residual",
]


class ModulusError(ValueError):
    """Malformed modulus problem, or a construction that failed.

    When the failure is solver infeasibility, ``result`` carries the
    full infeasible verdict including its certificate.
    """

    def __init__(self, message: str, result: Optional[InterpolationResult] = None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class ModulusProblem:
    """Target moduli at disc nodes, capped strictly below ``cap_c``.

    ``cap_c`` is the sup-norm budget for the constructed function; it
    defaults to twice the largest target so the log-targets stay clear
    of zero.  ``epsilon`` is the compatibility budget passed through to
    the harmonic solver.
    """

    sequence: PointSequence
    target_moduli: Tuple[float, ...]
    cap_c: Optional[float] = None
    epsilon: float = 0.1

    def __post_init__(self):
        moduli = tuple(float(m) for m in self.target_moduli)
        if len(moduli) != len(self.sequence):
            raise ModulusError(
                f"{len(moduli)} moduli for {len(self.sequence)} nodes"
            )
        if not moduli:
            raise ModulusError("empty problem")
        if any(not math.isfinite(m) or m <= 0 for m in moduli):
            raise ModulusError("target moduli must be positive and finite")
        if not (0 < self.epsilon <= 1):
            raise ModulusError(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        cap = self.cap_c
        if cap is None:
            cap = 2.0 * max(moduli)
        cap = float(cap)
        if not math.isfinite(cap) or cap <= 0:
            raise ModulusError(f"cap_c must be positive and finite, got {cap!r}")
        if any(m >= cap for m in moduli):
            raise ModulusError(
                "every target modulus must lie strictly below cap_c "
                "(log-target would vanish)"
            )
        object.__setattr__(self, "target_moduli", moduli)
        object.__setattr__(self, "cap_c", cap)

    @property
    def log_targets(self) -> Tuple[float, ...]:
        """The positive harmonic values ``log(cap_c / m_n)`` to interpolate."""
        return tuple(math.log(self.cap_c / m) for m in self.target_moduli)


def check_loglog_compat(problem: ModulusProblem) -> CompatCheck:
    """Pairwise double-log spacing check on the target moduli.

    Compares ``|log2 log(cap_c/m_n) - log2 log(cap_c/m_m)|`` against
    ``epsilon * beta(z_n, z_m)`` for every pair, with the same hair of
    rounding slack as the solver's value check; the witness is the pair
    with the largest ratio either way.  Passing is equivalent to the
    log-targets being value-compatible — the substitution is exact.
    """
    beta = pairwise_beta(problem.sequence)
    logs = np.log2(np.array(problem.log_targets))
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


def conjugate_at(mu: BoundaryMeasure, z: DiscPoint) -> float:
    """Conjugate Poisson integral of an atomic measure, zero at the origin.

    Closed form per atom at angle ``t`` seen from ``z = (theta, s)``:
    ``2 (1-s) sin(theta - t) / (s^2 + 4 (1-s) sin^2((theta - t)/2))`` —
    the imaginary counterpart of the kernel normalisation used by
    ``poisson_eval``, kept in boundary-depth coordinates throughout.
    """
    s = float(z.depth)
    delta = float(z.theta) - mu.angles
    denom = s * s + 4.0 * (1.0 - s) * np.sin(0.5 * delta) ** 2
    return float(np.dot(mu.masses, 2.0 * (1.0 - s) * np.sin(delta) / denom))


@dataclass(frozen=True)
class ModulusInterpolant:
    """Evaluable report for a constructed zero-free function.

    ``measure`` drives the harmonic exponent; ``result`` is the solver
    verdict it came from (residuals included).  Phases at the nodes are
    whatever the conjugate happens to produce — exposed, not matched.
    """

    problem: ModulusProblem
    measure: BoundaryMeasure
    result: InterpolationResult

    def evaluate(self, z: DiscPoint) -> complex:
        """Value ``cap_c * exp(-(u + i*conj_u))(z)``; never zero."""
        return self.problem.cap_c * cmath.exp(-self.measure.herglotz_eval(z))

    def modulus_at(self, z: DiscPoint) -> float:
        return self.problem.cap_c * math.exp(-self.measure.poisson_eval(z))

    @property
    def achieved_moduli(self) -> Tuple[float, ...]:
        return tuple(self.modulus_at(z) for z in self.problem.sequence.points)

    @property
    def achieved_phases(self) -> Tuple[float, ...]:
        return tuple(
            cmath.phase(self.evaluate(z)) for z in self.problem.sequence.points
        )


def construct_modulus_interpolant(
    problem: ModulusProblem,
    grid: Optional[GridSpec] = None,
) -> ModulusInterpolant:
    """Build the zero-free bounded function matching the target moduli.

    Solves the positive harmonic interpolation problem for the
    log-targets and wraps the resulting measure.  Raises
    :class:`ModulusError` when the double-log check fails (witness pair
    in the message) or when the solver reports infeasible (certificate
    attached to the exception).
    """
    ok, witness = check_loglog_compat(problem)
    if not ok:
        raise ModulusError(
            "targets violate the double-log spacing bound at node pair "
            f"({witness.first}, {witness.second}), ratio {witness.ratio:.3f}"
        )
    inner = InterpolationProblem(
        problem.sequence, problem.log_targets, epsilon=problem.epsilon
    )
    result = solve_direct(inner, grid)
    if not result.feasible:
        raise ModulusError(
            "harmonic interpolation of the log-targets is infeasible "
            f"on a grid of {result.grid_size} angles",
            result=result,
        )
    return ModulusInterpolant(problem, result.measure, result)


def cauchy_riemann_residual(
    mu: BoundaryMeasure,
    z: DiscPoint,
    step: float = 1e-5,
) -> float:
    """Largest Cauchy-Riemann defect of ``(u, conj_u)`` at ``z``.

    Central finite differences in Cartesian coordinates; returns
    ``max(|u_x - v_y|, |u_y + v_x|)`` where ``v = conjugate_at``.  Keep
    ``z`` at least a few ``step`` away from the boundary.
    """
    zc = complex(z.to_complex())
    x0, y0 = zc.real, zc.imag
    if math.hypot(x0, y0) + 2 * step >= 1.0:
        raise ModulusError("point too close to the boundary for the step size")

    def at(x: float, y: float) -> Tuple[float, float]:
        p = DiscPoint.from_xy(x, y)
        return mu.poisson_eval(p), conjugate_at(mu, p)

    u_e, v_e = at(x0 + step, y0)
    u_w, v_w = at(x0 - step, y0)
    u_n, v_n = at(x0, y0 + step)
    u_s, v_s = at(x0, y0 - step)
    u_x = (u_e - u_w) / (2 * step)
    u_y = (u_n - u_s) / (2 * step)
    v_x = (v_e - v_w) / (2 * step)
    v_y = (v_n - v_s) / (2 * step)
    return max(abs(u_x - v_y), abs(u_y + v_x))
