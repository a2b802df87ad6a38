"""Dantzig-Wolfe column generation on the variable-split model.

Every subperiod block (its copy of ``x``, its ``y`` and the replicated
first-stage rows) is represented by convex combinations of extreme points
plus nonnegative combinations of extreme rays. The restricted master ties
the copies together through nonanticipativity rows ``x_1 - x_s = 0`` and
one convexity row per block. Both row families carry penalized artificial
variables so the master is feasible from the first iteration.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ._parallel import ordered_map
from .lp import EQ, LinearProgram, LpStatus, solve_lp
from .model import MultiScaleInstance, build_block
from .results import AlgorithmResult, ConvergenceLog, Status

log = logging.getLogger(__name__)

EXTREME_POINT = "ExtremePoint"
EXTREME_RAY = "ExtremeRay"
DEFAULT_X_UPPER = 1e6


@dataclass(frozen=True, eq=False)
class Column:
    """A block point or ray.

    ``cost_part`` is the first-stage share ``c @ x / |S|`` plus the
    subperiod cost at the point (or along the ray).
    """

    subperiod: int
    kind: str
    x_part: np.ndarray
    cost_part: float
    y_part: Optional[np.ndarray] = None

    def same_as(self, other: "Column") -> bool:
        return (self.subperiod == other.subperiod and self.kind == other.kind
                and self.cost_part == other.cost_part
                and np.array_equal(self.x_part, other.x_part))


class NoImprovingColumn:
    """Pricing result when the block has no column of negative reduced cost."""

    def __init__(self, value: float):
        self.value = value

    def __repr__(self):
        return f"NoImprovingColumn(value={self.value!r})"


@dataclass
class RmpLayout:
    n_columns: int
    n_nac: int
    n_sub: int

    @property
    def n_art(self) -> int:
        return 2 * self.n_nac + self.n_sub


def build_rmp(inst: MultiScaleInstance, columns: List[Column],
              artificial_cost: float = 1e7) -> LinearProgram:
    """Restricted master over the column weights and the artificials.

    Rows: for ``s >= 2`` and each coordinate ``k`` the NAC row
    ``sum_{block 1} w x_k - sum_{block s} w x_k + a+ - a- = 0``, then one
    convexity row per block over its extreme-point weights plus one
    artificial.
    """
    if not artificial_cost > 0:
        raise ValueError("artificial_cost must be positive")
    S, n_x = inst.n_subperiods, inst.n_x
    n_nac = (S - 1) * n_x
    n_col = len(columns)
    n = n_col + 2 * n_nac + S
    m = n_nac + S
    A = np.zeros((m, n))
    costs = np.zeros(n)
    for j, col in enumerate(columns):
        costs[j] = col.cost_part
        if col.subperiod == 0:
            for t in range(1, S):
                A[(t - 1) * n_x:t * n_x, j] = col.x_part
        else:
            A[(col.subperiod - 1) * n_x:col.subperiod * n_x, j] = -col.x_part
        if col.kind == EXTREME_POINT:
            A[n_nac + col.subperiod, j] = 1.0
    for i in range(n_nac):
        A[i, n_col + 2 * i] = 1.0
        A[i, n_col + 2 * i + 1] = -1.0
    for s in range(S):
        A[n_nac + s, n_col + 2 * n_nac + s] = 1.0
    costs[n_col:] = artificial_cost
    rhs = np.concatenate([np.zeros(n_nac), np.ones(S)])
    return LinearProgram(costs, A, [EQ] * m, rhs, np.zeros(n), np.full(n, np.inf))


def _pricing_cost(inst, s, nu_duals):
    share = inst.first_stage.c / inst.n_subperiods
    nu = np.asarray(nu_duals, dtype=float).reshape(inst.n_subperiods - 1, inst.n_x)
    if s == 0:
        return share - nu.sum(axis=0)
    return share + nu[s - 1]


def price(inst: MultiScaleInstance, s: int, nu_duals, r_dual: float,
          x_upper=DEFAULT_X_UPPER, tol: float = 1e-9):
    """Solve the pricing problem of block ``s`` at the master duals.

    Returns
    -------
    (Column or NoImprovingColumn, value)
        ``value`` is the pricing optimum (``-inf`` along a ray). A point is
        returned when ``value < r_dual - tol * (1 + |r_dual|)``.
    """
    lp = build_block(inst, s, _pricing_cost(inst, s, nu_duals), x_upper=x_upper)
    sol = solve_lp(lp)
    n_x = inst.n_x
    share = inst.first_stage.c / inst.n_subperiods
    cost_vec = np.concatenate([share, inst.subperiods[s].cost])
    if sol.status is LpStatus.INFEASIBLE:
        raise RuntimeError(f"pricing block {s} is infeasible")
    if sol.status is LpStatus.UNBOUNDED:
        d = sol.primal_ray
        return Column(s, EXTREME_RAY, d[:n_x].copy(), float(cost_vec @ d), d[n_x:].copy()), -math.inf
    z = sol.primal
    value = sol.objective
    if value < r_dual - tol * (1 + abs(r_dual)):
        return Column(s, EXTREME_POINT, z[:n_x].copy(), float(cost_vec @ z), z[n_x:].copy()), value
    return NoImprovingColumn(value), value


def _default_x_upper(inst):
    up = np.array(inst.first_stage.upper, dtype=float)
    return np.where(np.isfinite(up), up, DEFAULT_X_UPPER)


def run_dw(inst: MultiScaleInstance, tol: float = 1e-6, max_iter: int = 100,
           artificial_cost: float = 1e7, x_upper=None, threads: int = 1) -> AlgorithmResult:
    """Column generation until no block prices out.

    The lower bound each round is the sum of the pricing optima; the upper
    bound is the best master objective seen with all artificials at zero.

    Parameters
    ----------
    x_upper : float or array, optional
        Box on ``x`` inside every pricing block. Defaults to the instance's
        finite upper bounds, else 1e6.
    """
    S, n_x = inst.n_subperiods, inst.n_x
    n_nac = (S - 1) * n_x
    if x_upper is None:
        x_upper = _default_x_upper(inst)
    columns: List[Column] = []
    clog = ConvergenceLog()
    lb, ub = -math.inf, math.inf
    best = None
    status = Status.ITERATION_LIMIT
    art_zero = False
    k = 0
    for k in range(1, max_iter + 1):
        rmp = build_rmp(inst, columns, artificial_cost)
        sol = solve_lp(rmp)
        if sol.status is not LpStatus.OPTIMAL:
            raise RuntimeError(f"restricted master is {sol.status.value}")
        n_col = len(columns)
        art = sol.primal[n_col:]
        art_zero = bool(np.all(art <= 1e-9))
        if art_zero and sol.objective < ub:
            ub = sol.objective
            best = (columns[:], sol.primal[:n_col].copy())
        nu, r = sol.duals[:n_nac], sol.duals[n_nac:]

        priced = ordered_map(lambda s: price(inst, s, nu, r[s], x_upper), range(S), threads)
        bound = sum(v for _, v in priced)
        lb = max(lb, bound)
        added = 0
        for res, _ in priced:
            if isinstance(res, Column) and not any(res.same_as(c) for c in columns):
                columns.append(res)
                added += 1
        clog.record(k, lb, ub)
        log.debug("dw iter %d lb=%.10g ub=%.10g cols=%d", k, lb, ub, added)
        if math.isfinite(ub) and ub - lb <= tol * (1 + abs(ub)):
            status = Status.CONVERGED
            break
        if added == 0:
            status = Status.CONVERGED if art_zero else Status.ARTIFICIALS_NONZERO
            break

    x = y = None
    if best is not None:
        cols, w = best
        x = sum((wj * c.x_part for c, wj in zip(cols, w) if c.subperiod == 0), np.zeros(n_x))
        y = [sum((wj * c.y_part for c, wj in zip(cols, w) if c.subperiod == s),
                 np.zeros(inst.subperiods[s].n_y)) for s in range(S)]
    elif status is Status.CONVERGED:
        status = Status.ARTIFICIALS_NONZERO
    return AlgorithmResult(
        status=status, x=x, y=y, objective=ub, lower_bound=lb, upper_bound=ub,
        log=clog, iterations=k, algorithm="dw",
        details={"columns": len(columns)},
    )
