"""Dense two-phase simplex for small linear programs.

Handles the d+1-variable programs produced by preference mining: minimize
c.x subject to rows of "coeffs . x <= rhs" or "coeffs . x = rhs" with all
variables bounded below by zero. Equalities are canonicalized into two
inequalities. Bland's rule (smallest-index entering and leaving choices)
precludes cycling; a pivot cap guards against numerical pathologies.

Programs here have at most ~10 variables and a few hundred rows, so a full
tableau is the simplest robust choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, NumericalFailure, ValidationError

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-10
MAX_PIVOTS = 10_000

LESS_EQUAL = "<="
EQUAL = "="


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LinearProgram:
    """Minimization program over nonnegative variables."""

    num_vars: int
    objective: tuple[float, ...]
    constraints: tuple[tuple[tuple[float, ...], str, float], ...] = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValidationError("num_vars must be positive")
        if len(self.objective) != self.num_vars:
            raise DimensionMismatchError(
                f"objective has {len(self.objective)} coefficients, "
                f"expected {self.num_vars}"
            )


def minimize(objective: Sequence[float]) -> LinearProgram:
    obj = tuple(float(c) for c in objective)
    if not all(np.isfinite(obj)):
        raise ValidationError("objective coefficients must be finite")
    return LinearProgram(num_vars=len(obj), objective=obj)


def add_constraint(
    lp: LinearProgram, coeffs: Sequence[float], relation: str, rhs: float
) -> LinearProgram:
    """Functionally append a constraint row; the previous solution may die."""
    row = tuple(float(c) for c in coeffs)
    if len(row) != lp.num_vars:
        raise DimensionMismatchError(
            f"constraint has {len(row)} coefficients, expected {lp.num_vars}"
        )
    if relation not in (LESS_EQUAL, EQUAL):
        raise ValidationError(f"unknown relation {relation!r}")
    rhs = float(rhs)
    if not all(np.isfinite(row)) or not np.isfinite(rhs):
        raise ValidationError("constraint coefficients must be finite")
    return LinearProgram(
        num_vars=lp.num_vars,
        objective=lp.objective,
        constraints=lp.constraints + ((row, relation, rhs),),
    )


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: np.ndarray | None
    objective_value: float | None


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    piv = T[row]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * piv
    basis[row] = col


def _run_simplex(
    T: np.ndarray, obj: np.ndarray, basis: np.ndarray, allowed: np.ndarray
) -> float:
    """Minimize over the tableau in place; returns pivot count.

    ``obj`` is the reduced-cost row (with objective value in the last slot,
    negated). ``allowed`` masks columns that may enter the basis.
    """
    pivots = 0
    ncols = T.shape[1] - 1
    while True:
        entering = -1
        for j in range(ncols):
            if allowed[j] and obj[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return pivots
        leaving = -1
        best_ratio = np.inf
        for i in range(T.shape[0]):
            a = T[i, entering]
            if a > PIVOT_TOL:
                ratio = T[i, -1] / a
                if ratio < best_ratio - PIVOT_TOL or (
                    abs(ratio - best_ratio) <= PIVOT_TOL
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise NumericalFailure("unbounded linear program")
        _pivot(T, basis, leaving, entering)
        obj -= obj[entering] * T[leaving]
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise NumericalFailure("simplex pivot cap exceeded")


def solve(lp: LinearProgram, tol: float = FEAS_TOL) -> LpSolution:
    """Solve to optimality or prove infeasibility.

    Returned values satisfy every constraint within ``tol``. Unbounded or
    cycling programs (impossible for the mining programs, whose objectives
    are bounded below on the feasible set) raise NumericalFailure.
    """
    n = lp.num_vars
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for coeffs, relation, b in lp.constraints:
        arr = np.asarray(coeffs, dtype=np.float64)
        rows.append(arr)
        rhs.append(float(b))
        if relation == EQUAL:
            rows.append(-arr)
            rhs.append(-float(b))
    m = len(rows)

    if m == 0:
        # Only x >= 0 bounds: the origin is optimal unless some objective
        # coefficient is negative, which would be unbounded.
        if any(c < 0 for c in lp.objective):
            raise NumericalFailure("unbounded linear program")
        x = np.zeros(n)
        return LpSolution(LpStatus.OPTIMAL, x, 0.0)

    A = np.vstack(rows)
    b = np.asarray(rhs, dtype=np.float64)

    # Slack per row; artificial for rows whose rhs is negative after the
    # sign flip that keeps the tableau's rhs column nonnegative.
    neg = b < 0.0
    n_art = int(neg.sum())
    ncols = n + m + n_art
    T = np.zeros((m, ncols + 1))
    T[:, :n] = A
    T[:, n : n + m] = np.eye(m)
    T[:, -1] = b
    T[neg] *= -1.0

    basis = np.empty(m, dtype=np.int64)
    art_col = n + m
    art_cols = []
    for i in range(m):
        if neg[i]:
            T[i, art_col] = 1.0
            basis[i] = art_col
            art_cols.append(art_col)
            art_col += 1
        else:
            basis[i] = n + i

    # Phase 1: minimize the sum of artificials.
    if n_art:
        c1 = np.zeros(ncols + 1)
        for col in art_cols:
            c1[col] = 1.0
        obj = c1.copy()
        for i in range(m):
            if c1[basis[i]] != 0.0:
                obj -= c1[basis[i]] * T[i]
        allowed = np.ones(ncols, dtype=bool)
        _run_simplex(T, obj, basis, allowed)
        phase1_value = -obj[-1]
        if phase1_value > tol:
            return LpSolution(LpStatus.INFEASIBLE, None, None)
        # Drive residual artificials out of the basis, dropping rows that
        # turn out to be redundant.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] in art_cols:
                pivot_col = -1
                for j in range(n + m):
                    if abs(T[i, j]) > PIVOT_TOL:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    _pivot(T, basis, i, pivot_col)
                else:
                    keep[i] = False
        if not keep.all():
            T = T[keep]
            basis = basis[keep]

    # Phase 2 on the original objective; artificial columns are barred.
    c2 = np.zeros(T.shape[1])
    c2[:n] = lp.objective
    obj = c2.copy()
    for i in range(T.shape[0]):
        if c2[basis[i]] != 0.0:
            obj -= c2[basis[i]] * T[i]
    allowed = np.ones(T.shape[1] - 1, dtype=bool)
    for col in art_cols:
        allowed[col] = False
    _run_simplex(T, obj, basis, allowed)

    x = np.zeros(T.shape[1] - 1)
    for i in range(T.shape[0]):
        x[basis[i]] = T[i, -1]
    values = x[:n]
    residual = A @ values - b
    if residual.size and residual.max() > 10 * tol:
        raise NumericalFailure(
            f"solution violates constraints by {residual.max():.3e}"
        )
    return LpSolution(LpStatus.OPTIMAL, values, float(np.dot(lp.objective, values)))
