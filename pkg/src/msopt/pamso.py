"""Parametric autotuning of a single-scale surrogate.

The surrogate (the aggregated capacity model) takes parameters ``rho``:
one availability prefactor per generator plus a minimum installed capacity.
Its ``x`` is fixed in the full multi-scale model, and the resulting cost is
a black-box function of ``rho`` that derivative-free tuners minimize.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .metrics import SENTINEL, capacity_highlevel_x, compute_mm, compute_mpss
from .model import CapacityInstance, lower_capacity, unit_params
from .results import AlgorithmResult, ConvergenceLog, Status

log = logging.getLogger(__name__)

PATTERN_SEARCH = "pattern_search"
GENETIC = "genetic"


@dataclass
class PamsoParams:
    rho: np.ndarray
    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        self.rho = np.array(self.rho, dtype=float).reshape(-1)
        self.low = np.array(self.low, dtype=float).reshape(-1)
        self.high = np.array(self.high, dtype=float).reshape(-1)
        if not (self.rho.shape == self.low.shape == self.high.shape):
            raise ValueError("rho and bounds must have the same length")
        if not (np.all(np.isfinite(self.low)) and np.all(np.isfinite(self.high))):
            raise ValueError("bounds must be finite")
        if np.any(self.low > self.high):
            raise ValueError("low bound above high bound")
        if np.any(self.rho < self.low) or np.any(self.rho > self.high):
            raise ValueError(f"rho {self.rho.tolist()} outside its bounds")

    def with_rho(self, rho) -> "PamsoParams":
        return PamsoParams(np.clip(rho, self.low, self.high), self.low, self.high)


@dataclass
class MbbfRecord:
    rho: PamsoParams
    objective: float
    x: Optional[np.ndarray] = None
    feasible: bool = True


@dataclass
class TuneResult:
    best: MbbfRecord
    trace: List[MbbfRecord] = field(default_factory=list)

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate([r.objective for r in self.trace])


def default_bounds(cap: CapacityInstance):
    """``rho_j`` in ``[0, 1.5]`` and ``rho_min`` up to the peak total demand."""
    low = np.zeros(cap.J + 1)
    high = np.concatenate([np.full(cap.J, 1.5), [float(cap.d.sum(axis=1).max())]])
    return low, high


def evaluate_mbbf(cap: CapacityInstance, rho: PamsoParams, inst=None) -> MbbfRecord:
    """Surrogate ``x`` at ``rho``, scored by the full model with ``x`` fixed."""
    x = capacity_highlevel_x(cap, rho.rho)
    if x is None:
        return MbbfRecord(rho, SENTINEL, None, False)
    if inst is None:
        inst = lower_capacity(cap)
    value = compute_mpss(inst, x)
    return MbbfRecord(rho, value, x, value != SENTINEL)


def _as_record(params, out):
    if isinstance(out, MbbfRecord):
        return out
    return MbbfRecord(params, float(out))


def tune_pattern_search(objective: Callable, start: PamsoParams, budget: int = 200,
                        init_step=None, shrink: float = 0.5, min_step: float = 1e-12) -> TuneResult:
    """Deterministic coordinate pattern search.

    Each poll probes ``current +/- step_i e_i`` (clipped to the bounds) for
    every coordinate and moves to the best strict improvement; when nothing
    improves, every step is multiplied by ``shrink``. Stops after ``budget``
    evaluations or once all steps fall below ``min_step`` times the range.

    Parameters
    ----------
    objective : callable
        ``PamsoParams -> MbbfRecord`` or a float.
    init_step : float or array, optional
        Defaults to a quarter of each coordinate's range.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    span = start.high - start.low
    step = 0.25 * span if init_step is None else np.broadcast_to(np.asarray(init_step, dtype=float), span.shape).copy()
    current = _as_record(start, objective(start))
    trace = [current]
    best = current
    while len(trace) < budget and np.any(step > min_step * np.maximum(span, 1.0)):
        poll_best = None
        for i in range(start.rho.size):
            for sign in (1.0, -1.0):
                if len(trace) >= budget:
                    break
                rho = current.rho.rho.copy()
                rho[i] += sign * step[i]
                cand = start.with_rho(rho)
                if np.array_equal(cand.rho, current.rho.rho):
                    continue
                rec = _as_record(cand, objective(cand))
                trace.append(rec)
                if rec.objective < best.objective:
                    best = rec
                if rec.objective < current.objective and (poll_best is None or rec.objective < poll_best.objective):
                    poll_best = rec
        if poll_best is None:
            step = step * shrink
        else:
            current = poll_best
    return TuneResult(best, trace)


def tournament_winner(fitness, contestants) -> int:
    """Index of the lowest-fitness contestant (first one on ties)."""
    contestants = list(contestants)
    return min(contestants, key=lambda i: (fitness[i], contestants.index(i)))


def tournament_select(fitness, rng: np.random.Generator, size: int = 2) -> int:
    """Draw ``size`` distinct individuals and return the fittest."""
    size = min(size, len(fitness))
    return tournament_winner(fitness, rng.choice(len(fitness), size=size, replace=False))


def tune_genetic(objective: Callable, bounds, pop_size: int = 20, generations: int = 30,
                 tournament_size: int = 2, crossover_rate: float = 0.9, mutation_rate: float = 0.2,
                 mutation_sigma: float = 0.1, seed: int = 0, baseline=None,
                 budget: Optional[int] = None) -> TuneResult:
    """Seeded real-coded genetic algorithm.

    Parameters
    ----------
    bounds : (low, high)
    mutation_sigma : float
        Standard deviation of the Gaussian mutation as a fraction of each
        coordinate's range.
    baseline : array, optional
        Injected as individual 0 of the initial population.
    budget : int, optional
        Hard cap on evaluations.
    """
    if pop_size < 2:
        raise ValueError("pop_size must be at least 2")
    for name, v in (("crossover_rate", crossover_rate), ("mutation_rate", mutation_rate)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1]")
    low, high = (np.asarray(b, dtype=float) for b in bounds)
    span = high - low
    rng = np.random.default_rng(seed)
    budget = math.inf if budget is None else budget
    template = PamsoParams(low.copy(), low, high)
    trace: List[MbbfRecord] = []

    def evaluate(rho):
        params = template.with_rho(rho)
        rec = _as_record(params, objective(params))
        trace.append(rec)
        return rec

    pop = low + rng.random((pop_size, low.size)) * span
    if baseline is not None:
        pop[0] = np.clip(baseline, low, high)
    records = []
    for rho in pop:
        if len(trace) >= budget:
            break
        records.append(evaluate(rho))
    for _ in range(generations):
        if len(trace) >= budget:
            break
        fitness = [r.objective for r in records]
        elite = records[int(np.argmin(fitness))]
        children = [elite]
        while len(children) < pop_size and len(trace) < budget:
            p1 = records[tournament_select(fitness, rng, tournament_size)].rho.rho
            p2 = records[tournament_select(fitness, rng, tournament_size)].rho.rho
            if rng.random() < crossover_rate:
                a = rng.random()
                child = a * p1 + (1 - a) * p2
            else:
                child = p1.copy()
            mask = rng.random(child.size) < mutation_rate
            child = child + mask * rng.normal(0.0, 1.0, child.size) * mutation_sigma * span
            children.append(evaluate(np.clip(child, low, high)))
        records = children
    best = min(trace, key=lambda r: r.objective)
    return TuneResult(best, trace)


def run_pamso(cap: CapacityInstance, dfo: str = PATTERN_SEARCH, bounds=None, budget: int = 200,
              seed: int = 0, with_mm: bool = True) -> AlgorithmResult:
    """Tune the surrogate parameters, starting from the unit parameters.

    The log has one entry per evaluation with ``upper_bound`` the best value
    so far and ``lower_bound`` the full-space optimum (``-inf`` when
    ``with_mm`` is false).
    """
    if bounds is None:
        bounds = default_bounds(cap)
    low, high = (np.asarray(b, dtype=float) for b in bounds)
    inst = lower_capacity(cap)
    start = PamsoParams(np.clip(unit_params(cap), low, high), low, high)

    def objective(params):
        return evaluate_mbbf(cap, params, inst)

    if dfo == PATTERN_SEARCH:
        res = tune_pattern_search(objective, start, budget=budget)
    elif dfo == GENETIC:
        pop = max(2, min(20, budget))
        gens = max(0, (budget - pop) // max(pop - 1, 1))
        res = tune_genetic(objective, (low, high), pop_size=pop, generations=gens, seed=seed,
                           baseline=start.rho, budget=budget)
    else:
        raise ValueError(f"unknown dfo {dfo!r}")

    mm = compute_mm(inst) if with_mm else -math.inf
    clog = ConvergenceLog()
    for i, value in enumerate(res.best_so_far(), start=1):
        clog.record(i, mm, float(value))
    best = res.best
    return AlgorithmResult(
        status=Status.CONVERGED if best.feasible else Status.INFEASIBLE,
        x=best.x, objective=best.objective, lower_bound=mm, upper_bound=best.objective,
        log=clog, iterations=len(res.trace), algorithm=f"pamso-{dfo}",
        details={"rho": best.rho.rho.copy(), "evaluations": len(res.trace)},
    )
