"""Command-line front end: ``msopt solve | metrics | generate | convert``.

Exit codes: 0 converged, 1 usage or input error, 2 iteration limit,
3 infeasible or unbounded (including artificials left in the DW master).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from .benders import SubproblemUnbounded, run_benders
from .dantzig_wolfe import run_dw
from .lagrangian import CUTTING_PLANE, SUBGRADIENT, run_lagrangian
from .lp import LpStatus, solve_lp
from .metrics import (InfeasibleInstance, NonConformableSubperiods, UnboundedInstance,
                      compute_all, compute_ev_eev_vss, compute_vmm)
from .model import CapacityInstance, build_fullspace, generate_random_instance, lower_capacity
from .pamso import GENETIC, PATTERN_SEARCH, run_pamso
from .results import AlgorithmResult, ConvergenceLog, Status
from .serialization import ParseError, dumps_instance, read_instance

ALGORITHMS = ("fullspace", "benders", "lagrangian-cp", "lagrangian-sg", "dw", "pamso")
EXIT_OK, EXIT_USAGE, EXIT_LIMIT, EXIT_INFEASIBLE = 0, 1, 2, 3
_EXIT = {
    Status.CONVERGED: EXIT_OK,
    Status.ITERATION_LIMIT: EXIT_LIMIT,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.UNBOUNDED: EXIT_INFEASIBLE,
    Status.ARTIFICIALS_NONZERO: EXIT_INFEASIBLE,
}

log = logging.getLogger("msopt")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msopt", description="Decomposition and autotuning for multi-time-scale LPs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--instance", required=True, help="instance JSON file")
        sp.add_argument("--out", help="write the JSON result here instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="worker threads for independent solves")

    s = sub.add_parser("solve", help="run one algorithm on an instance")
    common(s)
    s.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--big-m", type=float, default=1e7)
    s.add_argument("--nu-box", type=float, default=1e6)
    s.add_argument("--dfo", choices=(PATTERN_SEARCH, GENETIC), default=PATTERN_SEARCH)
    s.add_argument("--budget", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--log", help="write the convergence log CSV here")
    s.add_argument("--timing", action="store_true", help="record real wall_millis in the CSV")

    m = sub.add_parser("metrics", help="compute MM, MPSS/VMM and EV/EEV/VSS")
    common(m)
    m.add_argument("--report", choices=("vmm", "vss", "all"), default="all")

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n-x", type=int, default=2)
    g.add_argument("--n-y", type=int, default=2)
    g.add_argument("--rows", type=int, default=2)
    g.add_argument("--n-subperiods", type=int, default=3)
    g.add_argument("--out", help="output file (stdout when omitted)")

    c = sub.add_parser("convert", help="lower a capacity instance to a multiscale instance")
    c.add_argument("--instance", required=True)
    c.add_argument("--out", help="output file (stdout when omitted)")
    return p


def _emit(text: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fullspace(inst) -> AlgorithmResult:
    sol = solve_lp(build_fullspace(inst))
    clog = ConvergenceLog()
    if sol.status is LpStatus.INFEASIBLE:
        return AlgorithmResult(Status.INFEASIBLE, log=clog, algorithm="fullspace")
    if sol.status is LpStatus.UNBOUNDED:
        return AlgorithmResult(Status.UNBOUNDED, objective=-math.inf, log=clog, algorithm="fullspace")
    x, ys = inst.split_solution(sol.primal)
    clog.record(1, sol.objective, sol.objective)
    return AlgorithmResult(Status.CONVERGED, x=x, y=ys, objective=sol.objective,
                           lower_bound=sol.objective, upper_bound=sol.objective, log=clog,
                           iterations=1, algorithm="fullspace")


def cmd_solve(args) -> int:
    model = read_instance(args.instance)
    if args.max_iter < 0:
        raise UsageError("--max-iter must be nonnegative")
    algo = args.algorithm
    if algo == "pamso":
        if not isinstance(model, CapacityInstance):
            raise UsageError("pamso requires a capacity instance")
        if args.budget < 1:
            raise UsageError("--budget must be at least 1")
        result = run_pamso(model, dfo=args.dfo, budget=args.budget, seed=args.seed)
    else:
        inst = lower_capacity(model) if isinstance(model, CapacityInstance) else model
        if algo == "fullspace":
            result = _fullspace(inst)
        elif algo == "benders":
            result = run_benders(inst, args.tol, args.max_iter, args.big_m, args.threads)
        elif algo == "dw":
            result = run_dw(inst, args.tol, args.max_iter, threads=args.threads)
        else:
            method = CUTTING_PLANE if algo == "lagrangian-cp" else SUBGRADIENT
            result = run_lagrangian(inst, method, args.tol, args.max_iter, args.nu_box, args.threads)
    _emit(json.dumps(result.summary(), indent=2) + "\n", args.out)
    if args.log:
        with open(args.log, "w", newline="") as fh:
            result.log.write_csv(fh, timing=args.timing)
    for note in result.log.notes:
        log.warning(note)
    return _EXIT[result.status]


def cmd_metrics(args) -> int:
    model = read_instance(args.instance)
    if args.report == "vmm":
        if not isinstance(model, CapacityInstance):
            raise UsageError("vmm requires a high-level builder")
        report = compute_vmm(model)
    elif args.report == "vss":
        report = compute_ev_eev_vss(model)
    else:
        report = compute_all(model)
    _emit(report.to_json(), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        inst = generate_random_instance(args.seed, args.n_x, args.n_y, args.rows, args.n_subperiods)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(dumps_instance(inst), args.out)
    return EXIT_OK


def cmd_convert(args) -> int:
    model = read_instance(args.instance)
    if not isinstance(model, CapacityInstance):
        raise UsageError("convert expects a capacity instance")
    _emit(dumps_instance(lower_capacity(model)), args.out)
    return EXIT_OK


def _configure_logging():
    level = os.environ.get("MSOPT_LOG_LEVEL", "error").upper()
    if level not in ("ERROR", "INFO", "DEBUG"):
        level = "ERROR"
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "threads", 1) < 1:
        print("msopt: error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    handler = {"solve": cmd_solve, "metrics": cmd_metrics,
               "generate": cmd_generate, "convert": cmd_convert}[args.command]
    try:
        return handler(args)
    except (ParseError, UsageError, NonConformableSubperiods) as exc:
        print(f"msopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleInstance, UnboundedInstance, SubproblemUnbounded) as exc:
        print(f"msopt: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"msopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
