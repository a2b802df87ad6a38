"""Result and convergence-log types shared by the algorithms."""
from __future__ import annotations

import csv
import enum
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    ITERATION_LIMIT = "IterationLimit"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ARTIFICIALS_NONZERO = "ArtificialsNonzero"


@dataclass
class LogEntry:
    iteration: int
    lower_bound: float
    upper_bound: float
    gap: float
    wall_millis: int


CSV_COLUMNS = ("iteration", "lower_bound", "upper_bound", "gap", "wall_millis")


class ConvergenceLog:
    """Per-iteration bound trajectory."""

    def __init__(self):
        self.entries: List[LogEntry] = []
        self.notes: List[str] = []
        self._t0 = time.perf_counter()

    def record(self, iteration: int, lower_bound: float, upper_bound: float) -> LogEntry:
        if self.entries and iteration <= self.entries[-1].iteration:
            raise ValueError("iterations must be strictly increasing")
        if math.isfinite(lower_bound) and math.isfinite(upper_bound):
            gap = upper_bound - lower_bound
        else:
            gap = math.inf
        ms = int((time.perf_counter() - self._t0) * 1000)
        entry = LogEntry(iteration, float(lower_bound), float(upper_bound), gap, ms)
        self.entries.append(entry)
        return entry

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def lower_bounds(self) -> np.ndarray:
        return np.array([e.lower_bound for e in self.entries])

    def upper_bounds(self) -> np.ndarray:
        return np.array([e.upper_bound for e in self.entries])

    def write_csv(self, fh, timing: bool = True):
        """Write the log with a header row. ``timing=False`` zeroes wall_millis
        so that repeated runs produce identical files."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for e in self.entries:
            w.writerow([e.iteration, repr(e.lower_bound), repr(e.upper_bound), repr(e.gap),
                        e.wall_millis if timing else 0])


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _json_vec(v):
    if v is None:
        return None
    return [_json_float(t) for t in np.asarray(v, dtype=float).reshape(-1)]


@dataclass
class AlgorithmResult:
    status: Status
    x: Optional[np.ndarray] = None
    y: Optional[list] = None
    objective: float = math.inf
    lower_bound: float = -math.inf
    upper_bound: float = math.inf
    log: ConvergenceLog = field(default_factory=ConvergenceLog)
    iterations: int = 0
    algorithm: str = ""
    details: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        if math.isfinite(self.lower_bound) and math.isfinite(self.upper_bound):
            return self.upper_bound - self.lower_bound
        return math.inf

    def summary(self) -> dict:
        """JSON-ready dict without the log; non-finite numbers become null."""
        return {
            "algorithm": self.algorithm,
            "status": self.status.value,
            "objective": _json_float(self.objective),
            "lower_bound": _json_float(self.lower_bound),
            "upper_bound": _json_float(self.upper_bound),
            "iterations": self.iterations,
            "x": _json_vec(self.x),
            "y": None if self.y is None else [_json_vec(v) for v in self.y],
        }
