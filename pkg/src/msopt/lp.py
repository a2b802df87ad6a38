"""
Dense bounded revised simplex.

The solver returns certified outcomes: an optimal primal/dual pair, a Farkas
ray for infeasible programs, or a primal ray for unbounded ones. Every
decomposition algorithm in this package reads its cuts, multipliers and
prices from these certificates.

Sign conventions
----------------
Row duals follow the minimization convention ``y = d objective / d rhs``:
``y_i <= 0`` on LE rows, ``y_i >= 0`` on GE rows, free on EQ rows.

The Farkas ray ``r`` is oriented so that ``r_i >= 0`` on LE rows and
``r_i <= 0`` on GE rows (GE rows negated into LE form). Every feasible ``x``
then satisfies ``r^T A x <= r^T b``; infeasibility is proven by
``min over the variable box of (r^T A) x > r^T b``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.linalg

LE, GE, EQ = "LE", "GE", "EQ"
SENSES = (LE, GE, EQ)

_EPS = np.finfo(float).eps


class LPError(Exception):
    """Base class for LP engine failures."""


class MaxPivotsExceeded(LPError):
    pass


class NumericalBreakdown(LPError):
    pass


class ShapeMismatch(LPError, ValueError):
    pass


class LpStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Row:
    """One constraint ``sum_j coeffs[j] * x_j  (sense)  rhs``."""

    coeffs: Mapping[int, float]
    sense: str
    rhs: float


@dataclass(eq=False)
class LinearProgram:
    """``min costs @ x`` subject to ``A x (senses) rhs`` and ``lower <= x <= upper``.

    Stored densely. Use :meth:`from_rows` to build from sparse rows.
    """

    costs: np.ndarray
    A: np.ndarray
    senses: tuple
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    var_names: Optional[Sequence[str]] = None
    row_names: Optional[Sequence[str]] = None

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float).reshape(-1)
        n = self.costs.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        m = self.A.shape[0]
        self.senses = tuple(self.senses)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.lower = np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if len(self.senses) != m or self.rhs.size != m:
            raise ShapeMismatch(f"{m} rows but {len(self.senses)} senses and {self.rhs.size} rhs")
        if self.lower.size != n or self.upper.size != n:
            raise ShapeMismatch(f"{n} variables but bounds of size {self.lower.size}/{self.upper.size}")
        bad = [s for s in self.senses if s not in SENSES]
        if bad:
            raise ValueError(f"unknown row sense {bad[0]!r}")
        if np.any(self.lower > self.upper):
            j = int(np.argmax(self.lower > self.upper))
            raise ValueError(f"variable {j}: lower bound {self.lower[j]} exceeds upper {self.upper[j]}")
        if not (np.all(np.isfinite(self.costs)) and np.all(np.isfinite(self.A))
                and np.all(np.isfinite(self.rhs))):
            raise ValueError("costs, coefficients and rhs must be finite")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("bounds must not be NaN")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise ValueError("lower bounds cannot be +inf, upper bounds cannot be -inf")

    @classmethod
    def from_rows(cls, costs, rows: Sequence[Row], lower=None, upper=None, **names):
        costs = np.asarray(costs, dtype=float)
        n = costs.size
        A = np.zeros((len(rows), n))
        for i, row in enumerate(rows):
            for j, v in row.coeffs.items():
                if not 0 <= int(j) < n:
                    raise ShapeMismatch(f"row {i} references variable {j} but there are {n}")
                A[i, int(j)] += v
        lower = np.zeros(n) if lower is None else lower
        upper = np.full(n, np.inf) if upper is None else upper
        return cls(costs, A, [r.sense for r in rows], [r.rhs for r in rows], lower, upper, **names)

    @property
    def n_vars(self) -> int:
        return self.costs.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def to_lp_text(self) -> str:
        """CPLEX LP-format dump for cross-checking with external solvers."""
        vn = list(self.var_names) if self.var_names else [f"x{j}" for j in range(self.n_vars)]
        rn = list(self.row_names) if self.row_names else [f"r{i}" for i in range(self.n_rows)]

        def expr(coefs):
            terms = [f"{'+' if v >= 0 else '-'} {float(abs(v))!r} {vn[j]}" for j, v in enumerate(coefs) if v != 0]
            return " ".join(terms) if terms else "0 " + vn[0]

        op = {LE: "<=", GE: ">=", EQ: "="}
        lines = ["Minimize", f" obj: {expr(self.costs)}", "Subject To"]
        for i in range(self.n_rows):
            lines.append(f" {rn[i]}: {expr(self.A[i])} {op[self.senses[i]]} {float(self.rhs[i])!r}")
        lines.append("Bounds")
        for j in range(self.n_vars):
            lo, hi = self.lower[j], self.upper[j]
            lo_s = "-inf" if lo == -np.inf else repr(float(lo))
            hi_s = "+inf" if hi == np.inf else repr(float(hi))
            lines.append(f" {lo_s} <= {vn[j]} <= {hi_s}")
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: LpStatus
    primal: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    objective: Optional[float] = None
    farkas_ray: Optional[np.ndarray] = None
    primal_ray: Optional[np.ndarray] = None
    reduced_costs: Optional[np.ndarray] = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class SolveOptions:
    tol_feas: float = 1e-7
    tol_opt: float = 1e-9
    max_pivots: Optional[int] = None
    bland_after: Optional[int] = None


DEFAULT_OPTIONS = SolveOptions()

_BASIC, _AT_LOWER, _AT_UPPER, _FREE, _FIXED = range(5)


class _Simplex:
    """Working state of one solve. Not reused across calls."""

    def __init__(self, lp: LinearProgram, opts: SolveOptions):
        self.lp = lp
        self.opts = opts
        m, n = lp.n_rows, lp.n_vars
        self.m, self.n = m, n

        slack_lo = np.array([0.0 if s == LE else -np.inf if s == GE else 0.0 for s in lp.senses])
        slack_hi = np.array([np.inf if s == LE else 0.0 for s in lp.senses])
        lo = np.concatenate([lp.lower, slack_lo])
        hi = np.concatenate([lp.upper, slack_hi])
        x = np.zeros(n + m)
        xs = np.where(np.isfinite(lp.lower), lp.lower, np.where(np.isfinite(lp.upper), lp.upper, 0.0))
        x[:n] = xs

        resid = lp.rhs - lp.A @ xs
        slack = np.clip(resid, slack_lo, slack_hi)
        excess = resid - slack
        art_rows = np.flatnonzero(excess != 0.0)
        k = art_rows.size

        M = np.zeros((m, n + m + k))
        M[:, :n] = lp.A
        M[:, n:n + m] = np.eye(m)
        basis = list(range(n, n + m))
        x[n:n + m] = slack
        for a, i in enumerate(art_rows):
            M[i, n + m + a] = np.sign(excess[i])
            basis[i] = n + m + a
        x = np.concatenate([x, np.abs(excess[art_rows])])
        lo = np.concatenate([lo, np.zeros(k)])
        hi = np.concatenate([hi, np.full(k, np.inf)])

        self.M, self.lo, self.hi, self.x = M, lo, hi, x
        self.n_art = k
        self.basis = basis
        self.state = np.empty(n + m + k, dtype=int)
        self._init_states()
        self.pivots = 0
        size = n + m
        self.bland_after = opts.bland_after if opts.bland_after is not None else 10 * size
        self.max_pivots = opts.max_pivots if opts.max_pivots is not None else 100 * size + 1000

    def _init_states(self):
        st = self.state
        for j in range(st.size):
            lo, hi = self.lo[j], self.hi[j]
            if lo == hi:
                st[j] = _FIXED
            elif self.x[j] == lo:
                st[j] = _AT_LOWER
            elif self.x[j] == hi:
                st[j] = _AT_UPPER
            else:
                st[j] = _FREE
        st[self.basis] = _BASIC

    def _factor(self):
        if self.m == 0:
            return None
        B = self.M[:, self.basis]
        lu, piv = scipy.linalg.lu_factor(B, check_finite=False)
        if np.min(np.abs(np.diag(lu))) < 1e-12 * max(1.0, np.max(np.abs(B))):
            raise NumericalBreakdown("basis matrix is numerically singular")
        return lu, piv

    def _refresh_basic_values(self, fac):
        if self.m == 0:
            return
        nb = self.state != _BASIC
        r = self.lp.rhs - self.M[:, nb] @ self.x[nb]
        self.x[self.basis] = scipy.linalg.lu_solve(fac, r, check_finite=False)

    def run(self, cost: np.ndarray):
        """Minimize ``cost @ x`` from the current feasible basis.

        Returns ``(status, y, d, ray)`` with status "optimal" or "unbounded".
        """
        m = self.m
        while True:
            fac = self._factor()
            self._refresh_basic_values(fac)
            if m:
                y = scipy.linalg.lu_solve(fac, cost[self.basis], trans=1, check_finite=False)
            else:
                y = np.zeros(0)
            d = cost - self.M.T @ y
            # rounding-error allowance for c_j - a_j^T y
            ynorm = np.max(np.abs(y)) if m else 0.0
            tol_d = self.opts.tol_opt * (1.0 + np.abs(cost)) + 64 * _EPS * ynorm * np.abs(self.M).sum(axis=0)

            st = self.state
            inc = ((st == _AT_LOWER) | (st == _FREE)) & (d < -tol_d)
            dec = ((st == _AT_UPPER) | (st == _FREE)) & (d > tol_d)
            eligible = np.flatnonzero(inc | dec)
            if eligible.size == 0:
                return "optimal", y, d, None

            bland = self.pivots >= self.bland_after
            if bland:
                j = int(eligible[0])
            else:
                j = int(eligible[np.argmax(np.abs(d[eligible]))])
            direction = 1.0 if inc[j] else -1.0

            alpha = scipy.linalg.lu_solve(fac, self.M[:, j], check_finite=False) if m else np.zeros(0)
            delta = -direction * alpha  # rate of change of basic values

            t_best = self.hi[j] - self.lo[j]  # bound flip of the entering variable
            leave = -1
            best_piv = 0.0
            for r in range(m):
                dr = delta[r]
                if abs(dr) <= 1e-9:
                    continue
                b = self.basis[r]
                if dr < 0:
                    if self.lo[b] == -np.inf:
                        continue
                    t = (self.x[b] - self.lo[b]) / -dr
                else:
                    if self.hi[b] == np.inf:
                        continue
                    t = (self.hi[b] - self.x[b]) / dr
                t = max(t, 0.0)
                if leave < 0 and t < t_best:
                    better = True
                elif leave >= 0 and t < t_best - 1e-12:
                    better = True
                elif leave >= 0 and t <= t_best + 1e-12:
                    if bland:
                        better = b < self.basis[leave]
                    else:
                        better = abs(dr) > best_piv
                else:
                    better = False
                if better:
                    t_best, leave, best_piv = t, r, abs(dr)

            if t_best == np.inf:
                ray = np.zeros(self.x.size)
                ray[j] = direction
                ray[self.basis] = delta
                return "unbounded", y, d, ray

            if self.pivots >= self.max_pivots:
                raise MaxPivotsExceeded(f"pivot limit {self.max_pivots} reached")
            self.pivots += 1

            self.x[j] += direction * t_best
            if leave < 0:
                # entering variable runs to its opposite bound
                if direction > 0:
                    self.x[j], st[j] = self.hi[j], _AT_UPPER
                else:
                    self.x[j], st[j] = self.lo[j], _AT_LOWER
                continue
            if best_piv < 1e-12:
                raise NumericalBreakdown("pivot element below 1e-12")
            b = self.basis[leave]
            if delta[leave] < 0:
                self.x[b], st[b] = self.lo[b], _AT_LOWER
            else:
                self.x[b], st[b] = self.hi[b], _AT_UPPER
            if self.lo[b] == self.hi[b]:
                st[b] = _FIXED
            self.basis[leave] = j
            st[j] = _BASIC


def solve_lp(lp: LinearProgram, opts: SolveOptions = DEFAULT_OPTIONS) -> LpSolution:
    """Solve ``lp`` and return a status-tagged, certified solution.

    Phase 1 minimizes the sum of artificial variables; when that minimum is
    positive, its duals give the Farkas ray. Phase 2 runs from the feasible
    basis with artificials pinned to zero. Dantzig pricing is used until
    ``bland_after`` pivots, then Bland's rule guarantees termination.

    Raises
    ------
    MaxPivotsExceeded
        If ``max_pivots`` pivots are performed without termination.
    NumericalBreakdown
        If a basis becomes numerically singular.
    """
    sx = _Simplex(lp, opts)
    n, m, k = sx.n, sx.m, sx.n_art

    if k:
        cost1 = np.zeros(n + m + k)
        cost1[n + m:] = 1.0
        _, y1, _, _ = sx.run(cost1)
        infeas = float(sx.x[n + m:].sum())
        scale = 1.0 + (np.max(np.abs(lp.rhs)) if m else 0.0)
        if infeas > opts.tol_feas * scale:
            ray = -y1
            ray /= np.max(np.abs(ray))
            return LpSolution(LpStatus.INFEASIBLE, farkas_ray=ray, iterations=sx.pivots)
        # pin artificials at zero for phase 2
        sx.hi[n + m:] = 0.0
        sx.x[n + m:] = np.where(sx.state[n + m:] == _BASIC, sx.x[n + m:], 0.0)
        sx.state[n + m:] = np.where(sx.state[n + m:] == _BASIC, _BASIC, _FIXED)

    cost2 = np.zeros(n + m + k)
    cost2[:n] = lp.costs
    status, y, d, ray = sx.run(cost2)
    if status == "unbounded":
        pr = ray[:n].copy()
        pr /= np.max(np.abs(pr))
        return LpSolution(LpStatus.UNBOUNDED, primal_ray=pr, iterations=sx.pivots)

    x = sx.x[:n].copy()
    return LpSolution(
        LpStatus.OPTIMAL,
        primal=x,
        duals=y.copy(),
        objective=float(lp.costs @ x),
        reduced_costs=d[:n].copy(),
        iterations=sx.pivots,
    )


@dataclass
class Verdict:
    valid: bool
    condition: Optional[str] = None
    magnitude: float = 0.0
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.valid


def _box_min(g: np.ndarray, lower: np.ndarray, upper: np.ndarray, tol: float):
    """Minimum of ``g @ x`` over the box, or -inf with the offending index."""
    total = 0.0
    for j, gj in enumerate(g):
        if gj > tol:
            if lower[j] == -np.inf:
                return -np.inf, j
            total += gj * lower[j]
        elif gj < -tol:
            if upper[j] == np.inf:
                return -np.inf, j
            total += gj * upper[j]
    return total, None


def verify_certificate(lp: LinearProgram, sol: LpSolution, tol: float = 1e-7) -> Verdict:
    """Check the optimality / Farkas / ray conditions for ``sol.status``.

    Returns the first violated condition with its magnitude, or a valid
    verdict. Raises :class:`ShapeMismatch` when vector sizes disagree with
    ``lp``.
    """
    n, m = lp.n_vars, lp.n_rows
    A, b, c = lp.A, lp.rhs, lp.costs
    le = np.array([s == LE for s in lp.senses], dtype=bool)
    ge = np.array([s == GE for s in lp.senses], dtype=bool)
    eq = ~(le | ge)

    if sol.status is LpStatus.OPTIMAL:
        x, y = sol.primal, sol.duals
        if x is None or y is None or x.size != n or y.size != m:
            raise ShapeMismatch("primal/dual vectors do not match the program")
        obj = float(c @ x)
        scale = 1.0 + abs(obj)

        act = A @ x
        viol = np.zeros(m)
        viol[le] = act[le] - b[le]
        viol[ge] = b[ge] - act[ge]
        viol[eq] = np.abs(act[eq] - b[eq])
        viol /= 1.0 + np.abs(b)
        bviol = np.maximum(lp.lower - x, x - lp.upper)
        bviol = np.where(np.isfinite(bviol), bviol, -np.inf) if n else bviol
        worst = max(viol.max(initial=-np.inf), bviol.max(initial=-np.inf))
        if worst > tol:
            return Verdict(False, "primal feasibility", float(worst))

        sign = np.zeros(m)
        sign[le] = y[le]
        sign[ge] = -y[ge]
        if sign.max(initial=0.0) > tol:
            return Verdict(False, "dual sign", float(sign.max()))
        d = c - A.T @ y
        dtol = tol * (1.0 + np.abs(c))
        for j in range(n):
            if d[j] > dtol[j] and lp.lower[j] == -np.inf:
                return Verdict(False, "dual feasibility", float(d[j]), {"var": j})
            if d[j] < -dtol[j] and lp.upper[j] == np.inf:
                return Verdict(False, "dual feasibility", float(-d[j]), {"var": j})

        cs = np.abs(y * (act - b)).max(initial=0.0)
        for j in range(n):
            if d[j] > dtol[j]:
                cs = max(cs, abs(d[j] * (x[j] - lp.lower[j])))
            elif d[j] < -dtol[j]:
                cs = max(cs, abs(d[j] * (lp.upper[j] - x[j])))
        if cs > tol * scale:
            return Verdict(False, "complementary slackness", float(cs))

        dual_obj = float(y @ b)
        for j in range(n):
            if d[j] > dtol[j]:
                dual_obj += d[j] * lp.lower[j]
            elif d[j] < -dtol[j]:
                dual_obj += d[j] * lp.upper[j]
        gap = abs(obj - dual_obj)
        if gap > tol * scale:
            return Verdict(False, "strong duality", gap)
        if sol.objective is not None and abs(sol.objective - obj) > tol * scale:
            return Verdict(False, "objective mismatch", abs(sol.objective - obj))
        return Verdict(True)

    if sol.status is LpStatus.INFEASIBLE:
        r = sol.farkas_ray
        if r is None or r.size != m:
            raise ShapeMismatch("farkas ray does not match the row count")
        sign = np.zeros(m)
        sign[le] = -r[le]
        sign[ge] = r[ge]
        if sign.max(initial=0.0) > tol:
            return Verdict(False, "farkas sign", float(sign.max()))
        g = r @ A
        lo, j = _box_min(g, lp.lower, lp.upper, tol)
        if j is not None:
            return Verdict(False, "farkas cone", float(abs(g[j])), {"var": j})
        margin = lo - float(r @ b)
        if margin <= tol:
            return Verdict(False, "farkas margin", float(margin))
        return Verdict(True, details={"margin": margin})

    if sol.status is LpStatus.UNBOUNDED:
        dvec = sol.primal_ray
        if dvec is None or dvec.size != n:
            raise ShapeMismatch("primal ray does not match the variable count")
        Ad = A @ dvec
        viol = np.zeros(m)
        viol[le] = Ad[le]
        viol[ge] = -Ad[ge]
        viol[eq] = np.abs(Ad[eq])
        if viol.max(initial=0.0) > tol:
            return Verdict(False, "ray row directions", float(viol.max()))
        bd = np.concatenate([
            np.where(np.isfinite(lp.upper), dvec, 0.0),
            np.where(np.isfinite(lp.lower), -dvec, 0.0),
        ])
        if bd.max(initial=0.0) > tol:
            return Verdict(False, "ray bound directions", float(bd.max()))
        slope = float(c @ dvec)
        if slope >= -tol:
            return Verdict(False, "ray descent", slope)
        return Verdict(True, details={"slope": slope})

    raise ValueError(f"unknown status {sol.status!r}")
