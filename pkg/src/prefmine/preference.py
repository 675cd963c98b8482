"""Preference feasibility and robust preference mining via a Dijkstra oracle.

Two linear programs over the preference simplex drive everything:

* feasibility — does some preference make the trajectory an exact shortest
  path between its endpoints? Constraints demand the trajectory's
  personalized cost never exceeds any alternative path's.
* robust mining — minimize the slack delta by which the best alternative
  path undercuts the trajectory. Always feasible: delta absorbs any gap,
  so every trajectory yields a preference, with delta == 0 exactly when
  the feasibility program has a solution.

Neither program is materialized over all paths. Starting from the uniform
preference, each round runs one weighted Dijkstra; either it certifies the
current preference (no alternative beats the trajectory by more than the
current slack) or it yields a violated cut that is added to the LP.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import lp as lpmod
from . import routing
from .errors import NumericalFailure, OracleDivergence
from .graph import RoadNetwork
from .routing import Path

EPS_ORACLE = 1e-6
MAX_ROUNDS = 10_000
DELTA_ZERO = 1e-6


def oracle_eps() -> float:
    """Convergence tolerance, overridable via the PREFMINE_EPS env var."""
    raw = os.environ.get("PREFMINE_EPS")
    return float(raw) if raw else EPS_ORACLE


@dataclass(frozen=True)
class MiningResult:
    """Outcome of robust preference mining for one trajectory."""

    alpha: np.ndarray
    delta: float
    recovered_route: Path
    iterations: int
    constraints_added: int
    round_trip: bool


@dataclass(frozen=True)
class OracleRound:
    """One separation-oracle round: either converged or a new cut."""

    converged: bool
    violation: float
    best_path: Path
    cut: np.ndarray | None


def clean_alpha(alpha: np.ndarray) -> np.ndarray:
    """Clip LP roundoff negatives to zero and renormalize onto the simplex."""
    w = np.clip(np.asarray(alpha, dtype=np.float64), 0.0, None)
    total = float(w.sum())
    if total <= 0.0:
        raise NumericalFailure("LP produced an all-zero preference")
    return w / total


def oracle_round(
    network: RoadNetwork,
    path: Path,
    alpha: np.ndarray,
    delta: float = 0.0,
    *,
    robust: bool = False,
    eps: float | None = None,
) -> OracleRound:
    """Test ``alpha`` with one Dijkstra; emit a cut if it is violated.

    The cut coefficients are the trajectory's summed cost vector minus the
    best alternative's, with an extra -1 coefficient on the slack variable
    in robust mode.
    """
    eps = oracle_eps() if eps is None else eps
    c_traj = routing.path_cost_vector(path, network)
    best = routing.shortest_path(
        network, path.source, path.target, alpha, validate=False
    )
    diff = c_traj - routing.path_cost_vector(best, network)
    violation = float(alpha @ diff)
    if violation <= delta + eps:
        return OracleRound(True, violation, best, None)
    cut = np.append(diff, -1.0) if robust else diff
    return OracleRound(False, violation, best, cut)


def is_personalized_path(
    network: RoadNetwork,
    path: Path,
    *,
    eps: float | None = None,
    max_rounds: int = MAX_ROUNDS,
) -> np.ndarray | None:
    """Some preference making ``path`` a shortest path, or None.

    None means the cutting-plane loop proved the feasibility program empty:
    every preference on the simplex leaves some alternative strictly
    cheaper than the path.
    """
    eps = oracle_eps() if eps is None else eps
    d = network.cost_dim
    program = lpmod.minimize((0.0,) * d)
    program = lpmod.add_constraint(program, (1.0,) * d, lpmod.EQUAL, 1.0)
    alpha = np.full(d, 1.0 / d)
    for _ in range(max_rounds):
        rnd = oracle_round(network, path, alpha, 0.0, robust=False, eps=eps)
        if rnd.converged:
            return alpha
        program = lpmod.add_constraint(program, rnd.cut, lpmod.LESS_EQUAL, 0.0)
        solution = lpmod.solve(program)
        if solution.status is lpmod.LpStatus.INFEASIBLE:
            return None
        alpha = clean_alpha(solution.values)
    raise OracleDivergence(
        f"feasibility loop exceeded {max_rounds} rounds for a "
        f"{len(path)}-edge path"
    )


def recover_preference(
    network: RoadNetwork,
    path: Path,
    *,
    eps: float | None = None,
    max_rounds: int = MAX_ROUNDS,
) -> MiningResult:
    """Robust mining: minimize the slack by which any alternative wins.

    Always returns a result. delta == 0 (below the reporting threshold)
    exactly when the path is a personalized path. For round trips the
    best alternative is the empty path, so delta is the minimized
    personalized cost of the trajectory itself.
    """
    eps = oracle_eps() if eps is None else eps
    d = network.cost_dim
    program = lpmod.minimize((0.0,) * d + (1.0,))
    program = lpmod.add_constraint(program, (1.0,) * d + (0.0,), lpmod.EQUAL, 1.0)
    alpha = np.full(d, 1.0 / d)
    delta = 0.0
    cuts = 0
    rounds = 0
    best = None
    for rounds in range(1, max_rounds + 1):
        rnd = oracle_round(network, path, alpha, delta, robust=True, eps=eps)
        best = rnd.best_path
        if rnd.converged:
            break
        program = lpmod.add_constraint(program, rnd.cut, lpmod.LESS_EQUAL, 0.0)
        cuts += 1
        solution = lpmod.solve(program)
        if solution.status is not lpmod.LpStatus.OPTIMAL:
            raise NumericalFailure(
                "mining LP reported infeasible; it is feasible by construction"
            )
        alpha = clean_alpha(solution.values[:d])
        delta = max(0.0, float(solution.values[d]))
    else:
        raise OracleDivergence(
            f"mining loop exceeded {max_rounds} rounds for a "
            f"{len(path)}-edge path"
        )
    return MiningResult(
        alpha=alpha,
        delta=0.0 if delta < DELTA_ZERO else delta,
        recovered_route=best,
        iterations=rounds,
        constraints_added=cuts,
        round_trip=path.source == path.target,
    )
