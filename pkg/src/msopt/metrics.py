"""Value of the multi-scale model (VMM) and value of the stochastic solution (VSS).

``MM`` is the full-space optimum. ``MPSS`` fixes the ``x`` of a single-scale
surrogate in the full model; ``VMM = MPSS - MM``. ``EV`` solves one nominal
subperiod built from weight-averaged data, ``EEV`` evaluates its ``x`` on
every subperiod, and ``VSS = EEV - MM``. Any infeasible fixed-``x`` evaluation
scores the sentinel ``1e10``, which is carried through the differences.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .lp import LpStatus, solve_lp
from .model import (CapacityInstance, FirstStage, MultiScaleInstance, Subperiod,
                    aggregate_capacity_highlevel, build_fixed_x, build_fullspace, lower_capacity)

SENTINEL = 1e10


class InfeasibleInstance(RuntimeError):
    pass


class UnboundedInstance(RuntimeError):
    pass


class NonConformableSubperiods(ValueError):
    pass


@dataclass
class MetricsReport:
    mm: float
    mpss: Optional[float] = None
    vmm: Optional[float] = None
    ev: Optional[float] = None
    eev: Optional[float] = None
    vss: Optional[float] = None
    x_mm: Optional[np.ndarray] = None
    x_sm: Optional[np.ndarray] = None
    x_ev: Optional[np.ndarray] = None
    sentinel_used: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def num(v):
            return None if v is None or not math.isfinite(v) else float(v)

        def vec(v):
            return None if v is None else [float(t) for t in v]

        return {
            "mm": num(self.mm), "mpss": num(self.mpss), "vmm": num(self.vmm),
            "ev": num(self.ev), "eev": num(self.eev), "vss": num(self.vss),
            "x_mm": vec(self.x_mm), "x_sm": vec(self.x_sm), "x_ev": vec(self.x_ev),
            "sentinel_used": dict(sorted(self.sentinel_used.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def _solve_mm(inst: MultiScaleInstance):
    sol = solve_lp(build_fullspace(inst))
    if sol.status is LpStatus.INFEASIBLE:
        raise InfeasibleInstance(f"instance {inst.name or '<unnamed>'} is infeasible")
    if sol.status is LpStatus.UNBOUNDED:
        raise UnboundedInstance(f"instance {inst.name or '<unnamed>'} is unbounded")
    return sol.objective, sol.primal[:inst.n_x].copy()


def compute_mm(inst: MultiScaleInstance) -> float:
    """Full-space optimum."""
    return _solve_mm(inst)[0]


def _fixed_value(inst, x_star, include_first_stage):
    sol = solve_lp(build_fixed_x(inst, x_star, include_first_stage))
    if sol.status is LpStatus.INFEASIBLE:
        return SENTINEL
    if sol.status is LpStatus.UNBOUNDED:
        raise UnboundedInstance("fixed-x model is unbounded")
    return sol.objective


def compute_mpss(inst: MultiScaleInstance, x_star) -> float:
    """Full-model value with ``x`` fixed, or the sentinel when infeasible."""
    return _fixed_value(inst, x_star, True)


def capacity_highlevel_x(cap: CapacityInstance, rho=None) -> Optional[np.ndarray]:
    """Installed capacity chosen by the aggregated model, ``None`` if infeasible."""
    sol = solve_lp(aggregate_capacity_highlevel(cap, rho))
    if sol.status is not LpStatus.OPTIMAL:
        return None
    return sol.primal[:cap.J].copy()


def compute_vmm(model, builder: Optional[Callable] = None,
                report: Optional[MetricsReport] = None) -> MetricsReport:
    """Fill the MM, MPSS and VMM fields.

    Parameters
    ----------
    model : CapacityInstance or MultiScaleInstance
    builder : callable, optional
        Maps the instance to the surrogate's ``x`` (``None`` when the
        surrogate is infeasible). Required for a plain MultiScaleInstance;
        capacity instances default to the aggregated unit-parameter model.
    report : MetricsReport, optional
        Reused so that VMM and VSS share one MM value.
    """
    if isinstance(model, CapacityInstance):
        inst = lower_capacity(model)
        if builder is None:
            cap = model
            builder = lambda _inst: capacity_highlevel_x(cap)  # noqa: E731
    else:
        inst = model
        if builder is None:
            raise ValueError("vmm requires a high-level builder")
    if report is None:
        mm, x_mm = _solve_mm(inst)
        report = MetricsReport(mm=mm, x_mm=x_mm)
    x_sm = builder(inst)
    if x_sm is None:
        report.mpss = SENTINEL
        report.sentinel_used["mpss"] = True
    else:
        report.x_sm = np.asarray(x_sm, dtype=float)
        report.mpss = compute_mpss(inst, report.x_sm)
        report.sentinel_used["mpss"] = report.mpss == SENTINEL
    report.vmm = report.mpss - report.mm
    return report


def expected_value_instance(inst: MultiScaleInstance) -> MultiScaleInstance:
    """One nominal subperiod with normalized-weight averages of ``q, T, W, h``.

    Its weight is the total weight, so the objective stays on the scale of
    the full model.
    """
    subs = inst.subperiods
    ref = subs[0]
    for s, sub in enumerate(subs[1:], start=1):
        if (sub.n_y != ref.n_y or sub.n_rows != ref.n_rows or list(sub.senses) != list(ref.senses)
                or not np.array_equal(sub.lower, ref.lower) or not np.array_equal(sub.upper, ref.upper)):
            raise NonConformableSubperiods(f"subperiod {s} differs in shape, senses or bounds from subperiod 0")
    w = np.array([sub.weight for sub in subs])
    p = w / w.sum()

    def avg(name):
        return sum(pi * getattr(sub, name) for pi, sub in zip(p, subs))

    nominal = Subperiod(avg("q"), avg("T"), avg("W"), list(ref.senses), avg("h"),
                        weight=float(w.sum()), lower=ref.lower, upper=ref.upper)
    fs = inst.first_stage
    first = FirstStage(fs.c, fs.A, list(fs.senses), fs.b, fs.lower, fs.upper)
    return MultiScaleInstance(first, [nominal], name=f"{inst.name}-ev" if inst.name else "ev")


def compute_ev_eev_vss(model, report: Optional[MetricsReport] = None) -> MetricsReport:
    """Fill the EV, EEV and VSS fields (and MM when no report is passed)."""
    inst = lower_capacity(model) if isinstance(model, CapacityInstance) else model
    ev_inst = expected_value_instance(inst)
    if report is None:
        mm, x_mm = _solve_mm(inst)
        report = MetricsReport(mm=mm, x_mm=x_mm)
    sol = solve_lp(build_fullspace(ev_inst))
    if sol.status is LpStatus.UNBOUNDED:
        raise UnboundedInstance("expected-value model is unbounded")
    if sol.status is LpStatus.INFEASIBLE:
        report.ev = report.eev = SENTINEL
        report.sentinel_used["ev"] = report.sentinel_used["eev"] = True
    else:
        report.ev = sol.objective
        report.x_ev = sol.primal[:inst.n_x].copy()
        report.eev = _fixed_value(inst, report.x_ev, include_first_stage=False)
        report.sentinel_used["ev"] = False
        report.sentinel_used["eev"] = report.eev == SENTINEL
    report.vss = report.eev - report.mm
    return report


def compute_all(model, builder: Optional[Callable] = None) -> MetricsReport:
    """Every metric available for ``model`` from a single MM solve."""
    inst = lower_capacity(model) if isinstance(model, CapacityInstance) else model
    mm, x_mm = _solve_mm(inst)
    report = MetricsReport(mm=mm, x_mm=x_mm)
    if isinstance(model, CapacityInstance) or builder is not None:
        compute_vmm(model, builder, report)
    compute_ev_eev_vss(inst, report)
    return report
