"""Linear-programming engines behind the boundary-measure solvers.

Three workhorses live here:

* :func:`min_total_slack` -- the float (HiGHS) route for the equality
  feasibility problem ``K m = w, m >= 0`` relaxed with paired nonnegative
  slacks.  Its dual optimum *is* the Farkas vector when the optimum is
  positive, which is what makes infeasibility verdicts certifiable.
* :func:`exact_min_slack` -- the same program solved by a revised simplex
  over :class:`fractions.Fraction`.  Input floats are taken as the exact
  binary rationals they are, so the optimum and the dual vector are exact
  for the rounded data.  Pricing runs in floating point for speed; every
  pivot decision is re-checked exactly before it is taken.
* :func:`one_sided_level` / :func:`hinfty_level` -- the smaller inequality
  programs used by the partition oracle and the bounded-harmonic
  separation step.

Certificate hygiene (:func:`polish_certificate`) turns an approximate dual
vector into one whose sign conditions hold *exactly* in rational
arithmetic, or reports that it could not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog


class LpEngineError(RuntimeError):
    """The underlying LP solver failed in a way we cannot interpret."""


# --------------------------------------------------------------------------
# float route


@dataclass(frozen=True)
class SlackSolution:
    """Outcome of the slack-minimisation program.

    ``optimum`` is the minimal total absolute slack ``sum(|K m - w|)``;
    ``masses`` the optimising grid masses; ``dual`` the per-node vector
    ``x`` with ``<x, w> == optimum`` and ``x^T K <= 0`` columnwise at a
    positive optimum (Farkas orientation).
    """

    optimum: float
    masses: np.ndarray
    dual: np.ndarray


def min_total_slack(kernel: np.ndarray, targets: np.ndarray) -> SlackSolution:
    """Minimise ``sum of slacks`` in ``K m + p - q = w`` over ``m,p,q >= 0``.

    Rows are scaled by ``1/w_n`` internally (the targets may span many
    binary orders of magnitude) and the slack costs carry ``w_n`` so the
    reported optimum is the *unscaled* total slack.  Large kernel columns
    (deep nodes put single entries near ``1/depth``) are divided by a
    power of two so every coefficient stays inside the solver's comfort
    zone; that reparametrises the masses exactly and leaves the optimum
    and the dual untouched.
    """
    kernel = np.asarray(kernel, dtype=float)
    w = np.asarray(targets, dtype=float)
    d, g = kernel.shape
    if w.shape != (d,):
        raise LpEngineError(f"kernel rows {d} != target count {w.shape}")
    rows = kernel / w[:, None]
    col_scale = np.ones(g)
    col_max = np.abs(rows).max(axis=0)
    big = col_max > 1.0
    col_scale[big] = np.exp2(np.ceil(np.log2(col_max[big])))
    eye = np.eye(d)
    a_eq = np.hstack([rows / col_scale, eye, -eye])
    cost = np.concatenate([np.zeros(g), w, w])
    res = linprog(cost, A_eq=a_eq, b_eq=np.ones(d), bounds=(0, None), method="highs")
    if res.status != 0 or res.x is None:
        raise LpEngineError(f"slack LP did not converge: {res.message}")
    masses = np.maximum(res.x[:g] / col_scale, 0.0)
    # eqlin marginals are the duals of the scaled rows; undo the scaling so
    # the vector pairs with the raw kernel columns.
    dual = np.asarray(res.eqlin.marginals, dtype=float) / w
    if res.fun > 0 and float(dual @ w) < 0:
        dual = -dual  # guard against a marginal sign-convention change
    return SlackSolution(optimum=float(res.fun), masses=masses, dual=dual)


# --------------------------------------------------------------------------
# exact route


@dataclass(frozen=True)
class ExactSolution:
    """Exact optimum of the slack program for the float-rounded data."""

    optimum: Fraction
    dual: tuple[Fraction, ...]
    masses: dict[int, Fraction]
    iterations: int


def exact_min_slack(
    kernel: np.ndarray,
    targets: np.ndarray,
    max_iterations: int = 5000,
) -> ExactSolution:
    """Revised simplex over rationals for ``min sum(p+q), K m + p - q = w``.

    The starting basis is the ``p`` block (identity, feasible since
    ``w > 0``), so no phase-1 is needed.  Column selection prices in
    floating point and verifies the winner's reduced cost exactly; a full
    exact sweep confirms optimality before returning.  Intended for small
    node counts (the basis is ``d x d``); the column count may be large.
    """
    kern = np.asarray(kernel, dtype=float)
    w_float = np.asarray(targets, dtype=float)
    d, g = kern.shape
    if d > 16:
        raise LpEngineError(f"exact simplex limited to 16 rows, got {d}")
    n_cols = g + 2 * d

    w = [Fraction(v) for v in w_float]
    if any(v <= 0 for v in w):
        raise LpEngineError("targets must be positive")

    def column(j: int) -> list[Fraction]:
        if j < g:
            return [Fraction(float(kern[i, j])) for i in range(d)]
        if j < g + d:
            return [Fraction(1) if i == j - g else Fraction(0) for i in range(d)]
        return [Fraction(-1) if i == j - g - d else Fraction(0) for i in range(d)]

    def cost_of(j: int) -> Fraction:
        return Fraction(0) if j < g else Fraction(1)

    # float mirror of the constraint matrix for pricing
    a_float = np.hstack([kern, np.eye(d), -np.eye(d)])
    cost_float = np.concatenate([np.zeros(g), np.ones(2 * d)])

    basis = list(range(g, g + d))
    binv = [[Fraction(1) if i == j else Fraction(0) for j in range(d)] for i in range(d)]
    x_basic = list(w)

    def dual_vector() -> list[Fraction]:
        # y = c_B^T B^{-1}
        return [
            sum(cost_of(basis[i]) * binv[i][r] for i in range(d))
            for r in range(d)
        ]

    def exact_reduced(j: int, y: list[Fraction]) -> Fraction:
        col = column(j)
        return cost_of(j) - sum(y[i] * col[i] for i in range(d))

    bland = False
    iterations = 0
    while True:
        if iterations > max_iterations:
            raise LpEngineError("exact simplex exceeded its iteration budget")
        y = dual_vector()
        y_float = np.array([float(v) for v in y])
        reduced_float = cost_float - y_float @ a_float

        entering = -1
        if not bland:
            order = np.argsort(reduced_float)
            for j in order[:16]:
                if reduced_float[j] >= -1e-10:
                    break
                if exact_reduced(int(j), y) < 0:
                    entering = int(j)
                    break
        if entering < 0:
            # full exact sweep: either confirms optimality or finds a column
            # float pricing misjudged (ties near zero).
            candidates = np.flatnonzero(reduced_float < 1e-7)
            for j in candidates:
                if exact_reduced(int(j), y) < 0:
                    entering = int(j)
                    if bland:
                        break  # smallest index, Bland's rule
            if entering < 0:
                opt = sum(cost_of(basis[i]) * x_basic[i] for i in range(d))
                masses = {
                    basis[i]: x_basic[i]
                    for i in range(d)
                    if basis[i] < g and x_basic[i] != 0
                }
                return ExactSolution(
                    optimum=opt,
                    dual=tuple(y),
                    masses=masses,
                    iterations=iterations,
                )

        col = column(entering)
        direction = [sum(binv[i][r] * col[r] for r in range(d)) for i in range(d)]
        leaving = -1
        best: tuple[Fraction, int] | None = None
        for i in range(d):
            if direction[i] > 0:
                ratio = x_basic[i] / direction[i]
                key = (ratio, basis[i])
                if best is None or key < best:
                    best = key
                    leaving = i
        if leaving < 0:
            raise LpEngineError("slack program reported unbounded (data bug)")

        # pivot: replace basis[leaving] by entering, update B^{-1} and x
        pivot = direction[leaving]
        binv[leaving] = [v / pivot for v in binv[leaving]]
        x_basic[leaving] = x_basic[leaving] / pivot
        for i in range(d):
            if i != leaving and direction[i] != 0:
                factor = direction[i]
                row_l = binv[leaving]
                binv[i] = [binv[i][r] - factor * row_l[r] for r in range(d)]
                x_basic[i] = x_basic[i] - factor * x_basic[leaving]
        basis[leaving] = entering
        iterations += 1
        if iterations == 40 * (d + 4) and not bland:
            bland = True  # anti-cycling fallback; exact sweeps from here on


# --------------------------------------------------------------------------
# certificate verification and polish

_EPS = 2.0 ** -53


def _column_sign_certified(col: np.ndarray, x: np.ndarray) -> bool:
    """True when ``<x, col> <= 0`` provably holds.

    A float evaluation with a standard rounding-error envelope decides the
    easy columns; ambiguous ones are settled in exact rational arithmetic.
    """
    dot = float(x @ col)
    envelope = (len(x) + 2) * _EPS * float(np.abs(x) @ np.abs(col))
    if dot + envelope <= 0:
        return True
    if dot - envelope > 0:
        return False
    exact = sum(Fraction(float(a)) * Fraction(float(b)) for a, b in zip(x, col))
    return exact <= 0


def certificate_is_exact(kernel: np.ndarray, targets: np.ndarray, x: np.ndarray) -> bool:
    """Exact check of the Farkas sign conditions for the rounded data:
    ``<x, w> > 0`` and ``x^T K_g <= 0`` for every column ``g``."""
    dot_w = sum(Fraction(float(a)) * Fraction(float(b)) for a, b in zip(x, targets))
    if dot_w <= 0:
        return False
    kernel = np.asarray(kernel, dtype=float)
    return all(
        _column_sign_certified(kernel[:, j], x) for j in range(kernel.shape[1])
    )


def polish_certificate(
    kernel: np.ndarray,
    targets: np.ndarray,
    x: np.ndarray,
    attempts: int = 4,
) -> tuple[np.ndarray, bool]:
    """Nudge a float dual vector until its sign conditions hold exactly.

    Small positive column violations are absorbed by lowering the entry of
    the node whose *smallest* kernel value over the grid is largest — the
    cheapest row to pay the correction with.  Returns the adjusted vector
    and whether the exact check now passes.
    """
    kernel = np.asarray(kernel, dtype=float)
    x = np.asarray(x, dtype=float).copy()
    row_mins = kernel.min(axis=1)
    n0 = int(np.argmax(row_mins))
    if row_mins[n0] <= 0:
        return x, certificate_is_exact(kernel, targets, x)
    pad = 0.0
    for _ in range(attempts):
        worst = float(np.max(x @ kernel))
        if worst > 0 or pad > 0:
            x[n0] -= (max(worst, 0.0) + pad) / row_mins[n0]
        if certificate_is_exact(kernel, targets, x):
            return x, True
        pad = max(pad * 4, 4 * _EPS * float(np.abs(x) @ np.abs(kernel).max(axis=1)), 1e-15)
    return x, False


# --------------------------------------------------------------------------
# inequality programs


def one_sided_level(
    kernel: np.ndarray,
    targets: np.ndarray,
    upper_mask: np.ndarray,
) -> float:
    """Best coverage level ``c`` for one partition.

    Maximises ``c`` subject to ``(K m)_n >= c w_n`` on the masked nodes,
    ``(K m)_n <= w_n`` off it, ``m >= 0``, ``0 <= c <= 2``.  The partition
    is solvable exactly when the optimum reaches 1.
    """
    kernel = np.asarray(kernel, dtype=float)
    w = np.asarray(targets, dtype=float)
    mask = np.asarray(upper_mask, dtype=bool)
    d, g = kernel.shape
    rows_t = kernel[mask] / w[mask, None]
    rows_s = kernel[~mask] / w[~mask, None]
    n_t, n_s = rows_t.shape[0], rows_s.shape[0]
    # variables: masses then c; minimise -c
    a_ub = np.zeros((n_t + n_s, g + 1))
    b_ub = np.zeros(n_t + n_s)
    a_ub[:n_t, :g] = -rows_t
    a_ub[:n_t, g] = 1.0
    a_ub[n_t:, :g] = rows_s
    b_ub[n_t:] = 1.0
    cost = np.zeros(g + 1)
    cost[g] = -1.0
    bounds = [(0, None)] * g + [(0, 2.0)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0 or res.x is None:
        raise LpEngineError(f"one-sided LP did not converge: {res.message}")
    return float(res.x[g])


def hinfty_level(
    cell_measures: np.ndarray,
    upper_mask: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Best separation level for a bounded boundary density.

    ``cell_measures[n, g]`` is the harmonic measure at node ``n`` of grid
    cell ``g`` (rows sum to 1).  Finds ``h_g in [-1, 1]`` and the largest
    ``gamma in [0, 1]`` with ``sum_g cell_measures[n, g] h_g >= gamma`` on
    masked nodes and ``<= -gamma`` elsewhere.
    """
    omega = np.asarray(cell_measures, dtype=float)
    mask = np.asarray(upper_mask, dtype=bool)
    d, g = omega.shape
    a_ub = np.zeros((d, g + 1))
    a_ub[mask, :g] = -omega[mask]
    a_ub[~mask, :g] = omega[~mask]
    a_ub[:, g] = 1.0
    cost = np.zeros(g + 1)
    cost[g] = -1.0
    bounds = [(-1.0, 1.0)] * g + [(0.0, 1.0)]
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(d), bounds=bounds, method="highs")
    if res.status != 0 or res.x is None:
        raise LpEngineError(f"separation LP did not converge: {res.message}")
    return res.x[:g].copy(), float(res.x[g])
