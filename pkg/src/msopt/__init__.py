"""Decomposition algorithms and parametric autotuning for multi-time-scale LPs.

The package is built on a small dense bounded simplex (:mod:`msopt.lp`) and
an instance model (:mod:`msopt.model`) with first-stage variables ``x`` shared
by independent subperiod blocks. On top of them sit Benders, Lagrangian and
Dantzig-Wolfe decompositions, the VMM/VSS metrics, and PAMSO autotuning.
"""
from .benders import BendersCut, run_benders
from .dantzig_wolfe import Column, run_dw
from .lagrangian import Multipliers, run_lagrangian
from .lp import EQ, GE, LE, LinearProgram, LpSolution, LpStatus, Row, solve_lp, verify_certificate
from .metrics import MetricsReport, compute_all, compute_ev_eev_vss, compute_mm, compute_mpss, compute_vmm
from .model import (CapacityInstance, FirstStage, MultiScaleInstance, Subperiod,
                    aggregate_capacity_highlevel, build_fixed_x, build_fullspace,
                    generate_random_instance, lower_capacity, unit_params)
from .pamso import PamsoParams, evaluate_mbbf, run_pamso
from .results import AlgorithmResult, ConvergenceLog, Status
from .serialization import ParseError, SchemaVersionMismatch, read_instance, write_instance

__version__ = "0.1.0"

__all__ = [
    "AlgorithmResult", "BendersCut", "CapacityInstance", "Column", "ConvergenceLog", "EQ",
    "FirstStage", "GE", "LE", "LinearProgram", "LpSolution", "LpStatus", "MetricsReport",
    "MultiScaleInstance", "Multipliers", "PamsoParams", "ParseError", "Row",
    "SchemaVersionMismatch", "Status", "Subperiod", "aggregate_capacity_highlevel",
    "build_fixed_x", "build_fullspace", "compute_all", "compute_ev_eev_vss", "compute_mm",
    "compute_mpss", "compute_vmm", "evaluate_mbbf", "generate_random_instance",
    "lower_capacity", "read_instance", "run_benders", "run_dw", "run_lagrangian",
    "run_pamso", "solve_lp", "unit_params", "verify_certificate", "write_instance",
]
