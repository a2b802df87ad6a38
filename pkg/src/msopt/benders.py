"""Multi-cut Benders decomposition over the first-stage variables ``x``.

The master carries one epigraph variable ``z_s`` per subperiod, bounded
below by ``-big_m`` until cuts take over. Each iteration fixes the master's
``x``, solves every subperiod LP in primal form and turns its duals (or its
Farkas ray) into a cut.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ._parallel import ordered_map
from .lp import GE, LinearProgram, LpStatus, solve_lp
from .model import MultiScaleInstance
from .results import AlgorithmResult, ConvergenceLog, Status

log = logging.getLogger(__name__)

FEASIBILITY = "Feasibility"
OPTIMALITY = "Optimality"


class SubproblemUnbounded(RuntimeError):
    """A subperiod LP is unbounded for some ``x``; the recourse is not bounded."""


@dataclass(frozen=True, eq=False)
class BendersCut:
    """A linear inequality in ``(x, z_s)``.

    Optimality cuts read ``z_s + x_coeffs @ x >= constant`` and feasibility
    cuts read ``x_coeffs @ x >= constant``. For a subperiod with the default
    ``y >= 0`` box, ``constant`` is ``p @ h`` (or ``-w @ h``); finite ``y``
    bounds add their reduced-cost terms to it.
    """

    kind: str
    subperiod: int
    ray_or_point: np.ndarray
    constant: float
    x_coeffs: np.ndarray

    def violation(self, x, z_s=0.0) -> float:
        """Amount by which ``(x, z_s)`` violates the cut (<= 0 when satisfied)."""
        lhs = float(self.x_coeffs @ np.asarray(x, dtype=float))
        if self.kind == OPTIMALITY:
            lhs += z_s
        return self.constant - lhs


@dataclass
class OptimalityCutData:
    duals: np.ndarray
    value: float
    y: np.ndarray


@dataclass
class FeasibilityCutData:
    ray: np.ndarray
    margin: float


def build_master(inst: MultiScaleInstance, cuts: List[BendersCut], big_m: float) -> LinearProgram:
    """Master LP over ``(x, z_1, ..., z_S)`` with the given cuts.

    ``z_s >= -big_m`` is imposed as a variable bound.
    """
    if not big_m > 0:
        raise ValueError("big_m must be positive")
    fs = inst.first_stage
    n_x, S = inst.n_x, inst.n_subperiods
    n = n_x + S
    m0 = fs.A.shape[0]
    A = np.zeros((m0 + len(cuts), n))
    A[:m0, :n_x] = fs.A
    senses = list(fs.senses)
    rhs = list(fs.b)
    for i, cut in enumerate(cuts):
        A[m0 + i, :n_x] = cut.x_coeffs
        if cut.kind == OPTIMALITY:
            A[m0 + i, n_x + cut.subperiod] = 1.0
        senses.append(GE)
        rhs.append(cut.constant)
    costs = np.concatenate([fs.c, np.ones(S)])
    lower = np.concatenate([fs.lower, np.full(S, -big_m)])
    upper = np.concatenate([fs.upper, np.full(S, np.inf)])
    return LinearProgram(costs, A, senses, np.array(rhs, dtype=float), lower, upper)


def _subproblem_lp(inst, s, x_star) -> LinearProgram:
    sub = inst.subperiods[s]
    return LinearProgram(sub.cost, sub.W, sub.senses, sub.h - sub.T @ x_star, sub.lower, sub.upper)


def _box_min(g, lower, upper):
    # min over the y box of g @ y, assuming it is finite
    out = 0.0
    for gj, lo, hi in zip(g, lower, upper):
        if gj > 0:
            out += gj * lo
        elif gj < 0:
            out += gj * hi
    return out


def solve_subproblem(inst: MultiScaleInstance, s: int, x_star):
    """Solve subperiod ``s`` with ``x`` fixed.

    Returns
    -------
    OptimalityCutData or FeasibilityCutData
        Row duals and value when the LP is optimal; otherwise ``w = -r``,
        with ``r`` the normalized Farkas ray, and the margin
        ``w @ (h - T x_star) + min_box(r @ W y)``, which is positive.
    """
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    if x_star.size != inst.n_x:
        raise ValueError(f"x has {x_star.size} entries, instance has {inst.n_x}")
    lp = _subproblem_lp(inst, s, x_star)
    sol = solve_lp(lp)
    if sol.status is LpStatus.UNBOUNDED:
        raise SubproblemUnbounded(f"subperiod {s} is unbounded at x={x_star.tolist()}")
    if sol.status is LpStatus.INFEASIBLE:
        r = sol.farkas_ray
        beta = _box_min(r @ lp.A, lp.lower, lp.upper)
        return FeasibilityCutData(-r, beta - float(r @ lp.rhs))
    return OptimalityCutData(sol.duals, sol.objective, sol.primal)


def make_cut(inst: MultiScaleInstance, s: int, x_star, data) -> BendersCut:
    """Turn subproblem data at ``x_star`` into a cut valid for every ``x``."""
    sub = inst.subperiods[s]
    x_star = np.asarray(x_star, dtype=float)
    if isinstance(data, OptimalityCutData):
        p = data.duals
        g = p @ sub.T
        # v(x) >= v(x*) - p T (x - x*), because p is a subgradient of v in the rhs
        return BendersCut(OPTIMALITY, s, p, data.value + float(g @ x_star), g)
    w = data.ray
    # feasible x needs (-w) @ (h - T x) >= min_box((-w) @ W y)
    beta = _box_min(-w @ sub.W, sub.lower, sub.upper)
    return BendersCut(FEASIBILITY, s, w, float(w @ sub.h) + beta, w @ sub.T)


def run_benders(inst: MultiScaleInstance, tol: float = 1e-6, max_iter: int = 100,
                big_m: float = 1e7, threads: int = 1) -> AlgorithmResult:
    """Iterate master and subproblems until ``UB - LB <= tol * (1 + |UB|)``.

    Parameters
    ----------
    inst : MultiScaleInstance
    tol : float
        Relative gap tolerance.
    max_iter : int
        Number of master solves allowed.
    big_m : float
        Lower bound on each ``z_s`` before cuts are available.
    threads : int
        Workers for the per-subperiod solves. Cuts are always collected in
        subperiod order.

    Returns
    -------
    AlgorithmResult
        ``details["cuts"]`` holds every cut generated.
    """
    S, n_x = inst.n_subperiods, inst.n_x
    cuts: List[BendersCut] = []
    clog = ConvergenceLog()
    lb, ub = -math.inf, math.inf
    best_x: Optional[np.ndarray] = None
    best_y = None
    status = Status.ITERATION_LIMIT
    z = np.zeros(S)
    k = 0
    for k in range(1, max_iter + 1):
        msol = solve_lp(build_master(inst, cuts, big_m))
        if msol.status is LpStatus.INFEASIBLE:
            status = Status.INFEASIBLE
            break
        if msol.status is LpStatus.UNBOUNDED:
            status = Status.UNBOUNDED
            break
        x = msol.primal[:n_x]
        z = msol.primal[n_x:]
        lb = max(lb, msol.objective)

        results = ordered_map(lambda s: solve_subproblem(inst, s, x), range(S), threads)
        added = 0
        feasible = True
        for s, data in enumerate(results):
            cut = make_cut(inst, s, x, data)
            if isinstance(data, FeasibilityCutData):
                feasible = False
                cuts.append(cut)
                added += 1
            elif cut.violation(x, z[s]) > 1e-9 * (1 + abs(data.value)):
                cuts.append(cut)
                added += 1
        if feasible:
            cand = float(inst.first_stage.c @ x) + sum(d.value for d in results)
            if cand < ub:
                ub, best_x, best_y = cand, x.copy(), [d.y.copy() for d in results]
        clog.record(k, lb, ub)
        log.debug("benders iter %d lb=%.10g ub=%.10g cuts=%d", k, lb, ub, added)
        if math.isfinite(ub) and (ub - lb <= tol * (1 + abs(ub)) or (feasible and added == 0)):
            status = Status.CONVERGED
            break

    if status is Status.CONVERGED and np.any(z <= -big_m * (1 - 1e-12)):
        clog.notes.append("some z_s rests at -big_m; big_m may be too small")
        log.warning("benders: epigraph variable at -big_m on convergence")
    return AlgorithmResult(
        status=status, x=best_x, y=best_y,
        objective=ub if best_x is not None else math.inf,
        lower_bound=lb, upper_bound=ub, log=clog, iterations=k,
        algorithm="benders", details={"cuts": cuts},
    )
