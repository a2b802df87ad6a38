"""Lagrangian decomposition over per-subperiod copies of ``x``.

Each subperiod gets its own copy ``x_s`` with the first-stage rows
replicated and a ``c / |S|`` share of the first-stage cost. The
nonanticipativity rows ``x_1 = x_s`` (s >= 2) are dualized with multipliers
``nu[s-1]``, updated either by a Polyak subgradient step or by a
cutting-plane master LP.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ._parallel import ordered_map
from .benders import SubproblemUnbounded
from .lp import GE, LE, LinearProgram, LpStatus, solve_lp
from .model import MultiScaleInstance, build_block, build_fixed_x
from .results import AlgorithmResult, ConvergenceLog, Status

log = logging.getLogger(__name__)

SUBGRADIENT = "subgradient"
CUTTING_PLANE = "cutting_plane"
REPEAT_TOL = 1e-9


class ZeroSubgradient(Exception):
    """All copies of ``x`` agree, so the current multipliers are optimal."""


class MasterInfeasible(RuntimeError):
    pass


class BlockInfeasible(RuntimeError):
    """A subperiod block is infeasible, hence so is the whole instance."""


@dataclass
class Multipliers:
    """``nu[s-1, k]`` for subperiod ``s >= 2`` and coordinate ``k``."""

    nu: np.ndarray

    def __post_init__(self):
        self.nu = np.array(self.nu, dtype=float, ndmin=2)
        if not np.all(np.isfinite(self.nu)):
            raise ValueError("multipliers must be finite")

    @classmethod
    def zeros(cls, inst: MultiScaleInstance) -> "Multipliers":
        return cls(np.zeros((inst.n_subperiods - 1, inst.n_x)))

    def block_cost(self, inst: MultiScaleInstance, s: int) -> np.ndarray:
        """First-stage cost vector seen by block ``s``."""
        share = inst.first_stage.c / inst.n_subperiods
        if s == 0:
            return share + self.nu.sum(axis=0)
        return share - self.nu[s - 1]


@dataclass
class BlockSolution:
    """Block minimizer; ``base`` is its objective without multiplier terms."""

    x: np.ndarray
    y: np.ndarray
    objective: float
    base: float


@dataclass
class DualEvaluation:
    value: float
    per_subperiod: List[BlockSolution]


@dataclass
class SubgradientState:
    nu: Multipliers
    best_lb: float = -math.inf
    best_ub: float = math.inf
    incumbent_x: Optional[np.ndarray] = None
    k: int = 0


def _solve_block(inst, s, x_cost):
    lp = build_block(inst, s, x_cost)
    sol = solve_lp(lp)
    if sol.status is LpStatus.UNBOUNDED:
        raise SubproblemUnbounded(f"subperiod {s} block is unbounded")
    if sol.status is LpStatus.INFEASIBLE:
        raise BlockInfeasible(f"subperiod {s} block is infeasible")
    x, y = sol.primal[:inst.n_x].copy(), sol.primal[inst.n_x:].copy()
    base = float(inst.first_stage.c @ x) / inst.n_subperiods + float(inst.subperiods[s].cost @ y)
    return BlockSolution(x, y, sol.objective, base)


def evaluate_dual(inst: MultiScaleInstance, nu: Multipliers, threads: int = 1) -> DualEvaluation:
    """Lagrangian dual function value and the block minimizers at ``nu``."""
    if nu.nu.shape != (inst.n_subperiods - 1, inst.n_x):
        raise ValueError(f"multipliers have shape {nu.nu.shape}")
    blocks = ordered_map(lambda s: _solve_block(inst, s, nu.block_cost(inst, s)),
                         range(inst.n_subperiods), threads)
    return DualEvaluation(sum(b.objective for b in blocks), blocks)


def subgradient_step(state: SubgradientState, per_subperiod_x, v_star: float,
                     v_k: float) -> Multipliers:
    """Polyak step ``nu_s += lam * (x_1 - x_s)``.

    ``lam = (v_star - v_k) / sum_s ||x_1 - x_s||^2``. Raises
    :class:`ZeroSubgradient` when every copy equals ``x_1``.
    """
    xs = [np.asarray(x, dtype=float) for x in per_subperiod_x]
    g = np.array([xs[0] - x for x in xs[1:]]).reshape(state.nu.nu.shape)
    denom = float(np.sum(g * g))
    if denom == 0.0:
        raise ZeroSubgradient()
    lam = max(v_star - v_k, 0.0) / denom
    return Multipliers(state.nu.nu + lam * g)


def _cp_master(history, n_sub, n_x, nu_box):
    # variables: nu (n_sub-1)*n_x free, eta_s free; minimize -sum eta
    n_nu = (n_sub - 1) * n_x
    n = n_nu + n_sub
    rows, senses, rhs = [], [], []
    for blocks in history:
        for s, b in enumerate(blocks):
            a = np.zeros(n)
            a[n_nu + s] = 1.0
            if s == 0:
                for t in range(1, n_sub):
                    a[(t - 1) * n_x:t * n_x] = -b.x
            else:
                a[(s - 1) * n_x:s * n_x] = b.x
            rows.append(a)
            senses.append(LE)
            rhs.append(b.base)
    n_cut = len(rows)
    # box rows keep nonbasic multipliers at zero rather than at a bound
    for j in range(n_nu):
        for sense, bound in ((LE, nu_box), (GE, -nu_box)):
            a = np.zeros(n)
            a[j] = 1.0
            rows.append(a)
            senses.append(sense)
            rhs.append(bound)
    costs = np.concatenate([np.zeros(n_nu), -np.ones(n_sub)])
    lp = LinearProgram(costs, np.array(rows), senses, np.array(rhs),
                       np.full(n, -np.inf), np.full(n, np.inf))
    return lp, n_cut


def cutting_plane_update(history, nu_box: float = 1e6, return_master: bool = False):
    """Maximize the piecewise-linear model of the dual over the box.

    Parameters
    ----------
    history : list of list of BlockSolution
        One entry per evaluation, each a solution per subperiod.
    nu_box : float
        Half-width of the box on each multiplier.

    Returns
    -------
    Multipliers, or ``(Multipliers, master_value, weights)`` with
    ``return_master``. ``weights[k, s]`` are the master duals of the cuts,
    a convex combination over ``k`` for each ``s``.
    """
    if not history:
        raise ValueError("history is empty")
    n_sub = len(history[0])
    n_x = history[0][0].x.size
    lp, n_cut = _cp_master(history, n_sub, n_x, nu_box)
    sol = solve_lp(lp)
    if sol.status is not LpStatus.OPTIMAL:
        raise MasterInfeasible(f"cutting-plane master is {sol.status.value}")
    n_nu = (n_sub - 1) * n_x
    nu = Multipliers(sol.primal[:n_nu].reshape(n_sub - 1, n_x))
    if not return_master:
        return nu
    weights = -sol.duals[:n_cut].reshape(len(history), n_sub)
    return nu, -sol.objective, weights


def ub_heuristic(inst: MultiScaleInstance, x_candidates, threads: int = 1):
    """Best full-space value with ``x`` fixed to one of the candidates.

    Infeasible candidates score ``+inf``. Returns ``(value, x)``.
    """
    cands = [np.asarray(x, dtype=float) for x in x_candidates]
    if not cands:
        raise ValueError("no candidates")

    def score(x):
        sol = solve_lp(build_fixed_x(inst, x))
        return sol.objective if sol.status is LpStatus.OPTIMAL else math.inf

    values = ordered_map(score, cands, threads)
    best = int(np.argmin(values))
    return values[best], cands[best]


def _dedupe(cands):
    out = []
    for x in cands:
        if not any(np.array_equal(x, y) for y in out):
            out.append(x)
    return out


def run_lagrangian(inst: MultiScaleInstance, method: str = CUTTING_PLANE, tol: float = 1e-6,
                   max_iter: int = 100, nu_box: float = 1e6, threads: int = 1) -> AlgorithmResult:
    """Lagrangian decomposition with bound tracking.

    The upper bound comes from fixing ``x`` in the full model. Candidates are
    each block's ``x`` copy and, for the cutting-plane method, the convex
    combination of block-1 copies weighted by the master duals.

    Parameters
    ----------
    method : {"subgradient", "cutting_plane"}
    tol : float
        Relative gap tolerance on ``UB - LB``.
    nu_box : float
        Multiplier box for the cutting-plane master.
    """
    if method not in (SUBGRADIENT, CUTTING_PLANE):
        raise ValueError(f"unknown method {method!r}")
    S = inst.n_subperiods
    nu = Multipliers.zeros(inst)
    state = SubgradientState(nu)
    clog = ConvergenceLog()
    history = []
    status = Status.ITERATION_LIMIT
    best_y = None
    k = 0
    for k in range(1, max_iter + 1):
        state.k = k
        try:
            ev = evaluate_dual(inst, state.nu, threads)
        except BlockInfeasible:
            status = Status.INFEASIBLE
            break
        state.best_lb = max(state.best_lb, ev.value)
        history.append(ev.per_subperiod)

        cands = [b.x for b in ev.per_subperiod]
        next_nu = None
        if method == CUTTING_PLANE and S > 1:
            next_nu, _, weights = cutting_plane_update(history, nu_box, return_master=True)
            x_hat = sum(w * h[0].x for w, h in zip(weights[:, 0], history))
            cands.append(x_hat)
        value, x_best = ub_heuristic(inst, _dedupe(cands), threads)
        if value < state.best_ub:
            state.best_ub, state.incumbent_x = value, x_best
        clog.record(k, state.best_lb, state.best_ub)
        log.debug("lagrangian iter %d lb=%.10g ub=%.10g", k, state.best_lb, state.best_ub)

        ub, lb = state.best_ub, state.best_lb
        if math.isfinite(ub) and ub - lb <= tol * (1 + abs(ub)):
            status = Status.CONVERGED
            break
        if S == 1:
            # no coupling rows: the block value is already the optimum
            status = Status.CONVERGED if math.isfinite(ub) else Status.INFEASIBLE
            break
        if method == CUTTING_PLANE:
            if np.max(np.abs(next_nu.nu - state.nu.nu)) <= REPEAT_TOL:
                status = Status.CONVERGED
                clog.notes.append("multipliers repeated")
                break
            state.nu = next_nu
        else:
            v_star = ub if math.isfinite(ub) else ev.value + 0.05 * (1 + abs(ev.value))
            try:
                state.nu = subgradient_step(state, [b.x for b in ev.per_subperiod], v_star, ev.value)
            except ZeroSubgradient:
                status = Status.CONVERGED
                clog.notes.append("zero subgradient")
                break

    if state.incumbent_x is not None:
        sol = solve_lp(build_fixed_x(inst, state.incumbent_x))
        best_y = inst.split_solution(sol.primal)[1]
    return AlgorithmResult(
        status=status, x=state.incumbent_x, y=best_y, objective=state.best_ub,
        lower_bound=state.best_lb, upper_bound=state.best_ub, log=clog, iterations=k,
        algorithm=f"lagrangian-{'cp' if method == CUTTING_PLANE else 'subgradient'}",
        details={"multipliers": state.nu.nu.copy()},
    )
