"""Benders, Lagrangian and Dantzig-Wolfe on one instance.

All three reach the full-space optimum. Their bound trajectories move
differently: the Benders master value climbs from below, the DW master
descends from above, and the Lagrangian keeps a best lower bound plus a
fix-x heuristic upper bound. Each log is written as CSV for plotting.
"""
import sys
from pathlib import Path

from msopt import build_fullspace, generate_random_instance, run_benders, run_dw, run_lagrangian, solve_lp

inst = generate_random_instance(7, n_x=3, n_y=4, m_sub=4, n_subperiods=6)
mm = solve_lp(build_fullspace(inst)).objective
print(f"full-space optimum {mm:.6f}\n")

runs = {
    "benders": run_benders(inst),
    "lagrangian-cp": run_lagrangian(inst, "cutting_plane"),
    "lagrangian-sg": run_lagrangian(inst, "subgradient", max_iter=100),
    "dw": run_dw(inst),
}

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else None
for name, res in runs.items():
    print(f"{name:14s} {res.status.value:15s} iterations {res.iterations:3d}  "
          f"LB {res.lower_bound:12.6f}  UB {res.upper_bound:12.6f}")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / f"{name}.csv", "w", newline="") as fh:
            res.log.write_csv(fh, timing=False)

print("\nBenders lower bounds:", [round(e.lower_bound, 3) for e in runs["benders"].log][-5:])
print("DW upper bounds:     ", [round(e.upper_bound, 3) for e in runs["dw"].log][-5:])
