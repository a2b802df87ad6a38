"""
Multi-time-scale instances and the LP builders shared by every algorithm.

A :class:`MultiScaleInstance` holds a first-stage block ``(c, A, b)`` over the
high-level decisions ``x`` and one block ``(q_s, T_s, W_s, h_s, w_s)`` per
subperiod, with rows ``T_s x + W_s y_s (sense) h_s``. There are no rows
linking different subperiods.

Subperiod weights are folded into the costs (``w_s * q_s``) whenever an LP is
built, so downstream code only ever sees unweighted blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .lp import EQ, GE, LE, SENSES, LinearProgram


class DimensionMismatch(ValueError):
    pass


def _frozen(a, dtype=float, shape=None):
    arr = np.array(a, dtype=dtype)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


def _fields_equal(a, b) -> bool:
    if type(a) is not type(b):
        return NotImplemented
    for f in fields(a):
        u, v = getattr(a, f.name), getattr(b, f.name)
        if isinstance(u, np.ndarray) or isinstance(v, np.ndarray):
            if not np.array_equal(np.asarray(u), np.asarray(v)):
                return False
        elif u != v:
            return False
    return True


@dataclass(frozen=True, eq=False)
class FirstStage:
    """Costs ``c``, rows ``A x (senses) b`` and bounds on ``x``."""

    c: np.ndarray
    A: np.ndarray = None
    senses: tuple = ()
    b: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        c = _frozen(self.c, shape=(-1,))
        n = c.size
        m = len(self.senses)
        set_ = object.__setattr__
        set_(self, "c", c)
        set_(self, "A", _frozen(np.zeros((0, n)) if self.A is None else self.A, shape=(m, n)))
        set_(self, "senses", tuple(self.senses))
        set_(self, "b", _frozen(np.zeros(0) if self.b is None else self.b, shape=(m,)))
        set_(self, "lower", _frozen(np.zeros(n) if self.lower is None else self.lower, shape=(n,)))
        set_(self, "upper", _frozen(np.full(n, np.inf) if self.upper is None else self.upper, shape=(n,)))
        if any(s not in SENSES for s in self.senses):
            raise ValueError(f"unknown sense in {self.senses}")

    __eq__ = _fields_equal

    @property
    def n_x(self) -> int:
        return self.c.size


@dataclass(frozen=True, eq=False)
class Subperiod:
    """One subperiod block ``T x + W y (senses) h`` with cost ``q`` and weight."""

    q: np.ndarray
    T: np.ndarray
    W: np.ndarray
    senses: tuple
    h: np.ndarray
    weight: float = 1.0
    lower: np.ndarray = None
    upper: np.ndarray = None

    def __post_init__(self):
        q = _frozen(self.q, shape=(-1,))
        n_y = q.size
        m = len(self.senses)
        set_ = object.__setattr__
        set_(self, "q", q)
        T = np.asarray(self.T, dtype=float)
        if T.ndim != 2:
            T = T.reshape(m, -1)
        if T.shape[0] != m:
            raise DimensionMismatch(f"T has {T.shape[0]} rows, expected {m}")
        set_(self, "T", _frozen(T))
        set_(self, "W", _frozen(self.W, shape=(m, n_y)))
        set_(self, "senses", tuple(self.senses))
        set_(self, "h", _frozen(self.h, shape=(m,)))
        set_(self, "weight", float(self.weight))
        set_(self, "lower", _frozen(np.zeros(n_y) if self.lower is None else self.lower, shape=(n_y,)))
        set_(self, "upper", _frozen(np.full(n_y, np.inf) if self.upper is None else self.upper, shape=(n_y,)))
        if not self.weight > 0:
            raise ValueError(f"subperiod weight must be positive, got {self.weight}")
        if any(s not in SENSES for s in self.senses):
            raise ValueError(f"unknown sense in {self.senses}")

    __eq__ = _fields_equal

    @property
    def n_y(self) -> int:
        return self.q.size

    @property
    def n_rows(self) -> int:
        return len(self.senses)

    @property
    def cost(self) -> np.ndarray:
        """Weighted cost vector ``w_s * q_s``."""
        return self.weight * self.q


@dataclass(frozen=True, eq=False)
class MultiScaleInstance:
    first_stage: FirstStage
    subperiods: tuple
    name: str = ""
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "subperiods", tuple(self.subperiods))
        if not self.subperiods:
            raise DimensionMismatch("an instance needs at least one subperiod")
        n_x = self.first_stage.n_x
        for s, sub in enumerate(self.subperiods):
            if sub.T.shape[1] != n_x:
                raise DimensionMismatch(
                    f"subperiod {s}: T has {sub.T.shape[1]} columns, expected {n_x}")

    __eq__ = _fields_equal

    @property
    def n_x(self) -> int:
        return self.first_stage.n_x

    @property
    def n_subperiods(self) -> int:
        return len(self.subperiods)

    def y_offsets(self) -> list:
        """Start index of each ``y_s`` inside the full-space variable vector."""
        out, pos = [], self.n_x
        for sub in self.subperiods:
            out.append(pos)
            pos += sub.n_y
        return out

    def split_solution(self, z: np.ndarray):
        """Split a full-space vector into ``(x, [y_1, ..., y_S])``."""
        offs = self.y_offsets()
        ys = [np.asarray(z[o:o + sub.n_y]) for o, sub in zip(offs, self.subperiods)]
        return np.asarray(z[:self.n_x]), ys


def build_fullspace(inst: MultiScaleInstance) -> LinearProgram:
    """The monolithic LP over ``(x, y_1, ..., y_S)``."""
    fs = inst.first_stage
    n_x = inst.n_x
    n = n_x + sum(sub.n_y for sub in inst.subperiods)
    m = fs.A.shape[0] + sum(sub.n_rows for sub in inst.subperiods)
    A = np.zeros((m, n))
    costs = np.concatenate([fs.c] + [sub.cost for sub in inst.subperiods])
    lower = np.concatenate([fs.lower] + [sub.lower for sub in inst.subperiods])
    upper = np.concatenate([fs.upper] + [sub.upper for sub in inst.subperiods])
    senses = list(fs.senses)
    rhs = [fs.b]
    A[:fs.A.shape[0], :n_x] = fs.A
    r = fs.A.shape[0]
    for off, sub in zip(inst.y_offsets(), inst.subperiods):
        A[r:r + sub.n_rows, :n_x] = sub.T
        A[r:r + sub.n_rows, off:off + sub.n_y] = sub.W
        senses += sub.senses
        rhs.append(sub.h)
        r += sub.n_rows
    return LinearProgram(costs, A, senses, np.concatenate(rhs), lower, upper)


def build_fixed_x(inst: MultiScaleInstance, x_star, include_first_stage: bool = True) -> LinearProgram:
    """Full-space LP with ``x`` pinned to ``x_star`` through equality rows.

    With ``include_first_stage=False`` the first-stage rows are dropped, which
    is the shape used when evaluating an expected-value solution.
    """
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    if x_star.size != inst.n_x:
        raise DimensionMismatch(f"x has {x_star.size} entries, instance has {inst.n_x}")
    lp = build_fullspace(inst)
    m0 = inst.first_stage.A.shape[0]
    A, senses, rhs = lp.A, list(lp.senses), lp.rhs
    if not include_first_stage:
        A, senses, rhs = A[m0:], senses[m0:], rhs[m0:]
    pin = np.zeros((inst.n_x, lp.n_vars))
    pin[:, :inst.n_x] = np.eye(inst.n_x)
    return LinearProgram(
        lp.costs,
        np.vstack([A, pin]),
        senses + [EQ] * inst.n_x,
        np.concatenate([rhs, x_star]),
        lp.lower,
        lp.upper,
    )


def build_block(inst: MultiScaleInstance, s: int, x_cost, x_upper=None) -> LinearProgram:
    """Single-subperiod LP over ``(x, y_s)`` with the first-stage rows replicated.

    ``x_cost`` replaces the first-stage cost (callers pass the ``c / |S|``
    share plus any multiplier terms). ``x_upper`` optionally tightens the
    upper bounds on ``x``.
    """
    fs, sub = inst.first_stage, inst.subperiods[s]
    n_x = inst.n_x
    m0 = fs.A.shape[0]
    A = np.zeros((m0 + sub.n_rows, n_x + sub.n_y))
    A[:m0, :n_x] = fs.A
    A[m0:, :n_x] = sub.T
    A[m0:, n_x:] = sub.W
    upper = fs.upper if x_upper is None else np.minimum(fs.upper, x_upper)
    return LinearProgram(
        np.concatenate([np.asarray(x_cost, dtype=float), sub.cost]),
        A,
        list(fs.senses) + list(sub.senses),
        np.concatenate([fs.b, sub.h]),
        np.concatenate([fs.lower, sub.lower]),
        np.concatenate([upper, sub.upper]),
    )


# -- capacity expansion example -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CapacityInstance:
    """Generator capacity-expansion data.

    Shapes: ``a[s, i, j]`` availability, ``c[j]`` daily fixed cost,
    ``d[s, i]`` demand, ``f[i, j]`` operating cost, ``g[s]`` purchase cost.
    ``x_upper`` optionally caps installed capacity.
    """

    a: np.ndarray
    c: np.ndarray
    d: np.ndarray
    f: np.ndarray
    g: np.ndarray
    x_upper: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 3:
            raise DimensionMismatch("availability must be indexed [s][i][j]")
        S, I, J = a.shape
        set_ = object.__setattr__
        try:
            set_(self, "a", _frozen(a))
            set_(self, "c", _frozen(self.c, shape=(J,)))
            set_(self, "d", _frozen(self.d, shape=(S, I)))
            set_(self, "f", _frozen(self.f, shape=(I, J)))
            set_(self, "g", _frozen(self.g, shape=(S,)))
            if self.x_upper is not None:
                set_(self, "x_upper", _frozen(self.x_upper, shape=(J,)))
        except ValueError as exc:
            raise DimensionMismatch(str(exc)) from exc
        for name in ("a", "c", "d", "f", "g"):
            v = getattr(self, name)
            if not np.all(np.isfinite(v)) or np.any(v < 0):
                raise ValueError(f"{name} must be finite and nonnegative")
        if np.any(a > 1):
            raise ValueError("availabilities must lie in [0, 1]")

    __eq__ = _fields_equal

    @property
    def J(self) -> int:
        return self.a.shape[2]

    @property
    def I(self) -> int:  # noqa: E743
        return self.a.shape[1]

    @property
    def S(self) -> int:
        return self.a.shape[0]


def lower_capacity(cap: CapacityInstance) -> MultiScaleInstance:
    """Write the capacity model as a :class:`MultiScaleInstance`.

    Per subperiod the variables are ``y[i, j]`` (row-major over ``i``) followed
    by the purchases ``y~[i]``; rows are ``y[i, j] - a[s, i, j] x_j <= 0`` then
    ``sum_j y[i, j] + y~[i] >= d[s, i]``.
    """
    S, I, J = cap.S, cap.I, cap.J
    fs = FirstStage(c=S * cap.c, upper=cap.x_upper)
    n_y = I * J + I
    subs = []
    for s in range(S):
        T = np.zeros((I * J + I, J))
        W = np.zeros((I * J + I, n_y))
        h = np.zeros(I * J + I)
        for i in range(I):
            for j in range(J):
                r = i * J + j
                W[r, r] = 1.0
                T[r, j] = -cap.a[s, i, j]
            r = I * J + i
            W[r, i * J:(i + 1) * J] = 1.0
            W[r, I * J + i] = 1.0
            h[r] = cap.d[s, i]
        q = np.concatenate([cap.f.reshape(-1), np.full(I, cap.g[s])])
        subs.append(Subperiod(q, T, W, [LE] * (I * J) + [GE] * I, h))
    return MultiScaleInstance(fs, subs, name=cap.name)


def unit_params(cap: CapacityInstance) -> np.ndarray:
    """Availability prefactors of one and no minimum capacity."""
    return np.concatenate([np.ones(cap.J), [0.0]])


def aggregate_capacity_highlevel(cap: CapacityInstance, rho=None) -> LinearProgram:
    """Single-time-scale surrogate over ``(x_j, y_j, y~)``.

    ``rho`` holds one availability prefactor per generator followed by the
    minimum installed capacity. ``None`` means unit parameters, which gives the
    plain aggregated model.
    """
    rho = unit_params(cap) if rho is None else np.asarray(getattr(rho, "rho", rho), dtype=float)
    S, J = cap.S, cap.J
    if rho.size != J + 1:
        raise DimensionMismatch(f"expected {J + 1} parameters, got {rho.size}")
    n = 2 * J + 1
    costs = np.concatenate([S * cap.c, S * cap.f.sum(axis=0), [cap.g.sum()]])
    avail = cap.a.sum(axis=(0, 1))
    A = np.zeros((2 * J + 1, n))
    senses, rhs = [], []
    for j in range(J):
        A[j, J + j] = 1.0
        A[j, j] = -rho[j] * avail[j]
        senses.append(LE)
        rhs.append(0.0)
    A[J, J:] = 1.0
    senses.append(GE)
    rhs.append(cap.d.sum())
    for j in range(J):
        A[J + 1 + j, j] = 1.0
        senses.append(GE)
        rhs.append(rho[J])
    upper = np.full(n, np.inf)
    if cap.x_upper is not None:
        upper[:J] = cap.x_upper
    return LinearProgram(costs, A, senses, rhs, np.zeros(n), upper)


# -- random instances --------------------------------------------------------------------


def generate_random_instance(seed: int, n_x: int = 2, n_y: int = 2, m_sub: int = 2,
                             n_subperiods: int = 3) -> MultiScaleInstance:
    """Seeded random instance with complete recourse and bounded ``x``.

    Every subperiod carries one elastic column per row direction (``+e_i`` for
    GE/EQ rows, ``-e_i`` for LE/EQ rows) with cost in [5, 50], so any ``x``
    satisfying the first-stage rows leaves every subperiod feasible. Row senses
    are shared by all subperiods.
    """
    if min(n_x, n_y, m_sub, n_subperiods) < 1:
        raise ValueError("all dimensions must be at least 1")
    rng = np.random.default_rng(seed)
    x_upper = rng.uniform(1.0, 100.0, n_x)
    c = rng.uniform(1.0, 10.0, n_x)
    budget = rng.uniform(0.5, 2.0, n_x)
    fs = FirstStage(
        c=c,
        A=budget[None, :],
        senses=[LE],
        b=[rng.uniform(0.3, 0.9) * float(budget @ x_upper)],
        upper=x_upper,
    )
    senses = [str(v) for v in rng.choice([GE, LE, EQ], size=m_sub, p=[0.6, 0.25, 0.15])]
    elastic = []
    for i, s in enumerate(senses):
        if s in (GE, EQ):
            elastic.append((i, 1.0))
        if s in (LE, EQ):
            elastic.append((i, -1.0))
    subs = []
    for _ in range(n_subperiods):
        T = rng.uniform(-1.0, 2.0, (m_sub, n_x)) * (rng.random((m_sub, n_x)) < 0.8)
        W = rng.uniform(-1.0, 2.0, (m_sub, n_y))
        P = np.zeros((m_sub, len(elastic)))
        for k, (i, sign) in enumerate(elastic):
            P[i, k] = sign
        h = np.array([
            rng.uniform(0.0, 50.0) if s == GE else rng.uniform(-5.0, 40.0) if s == LE else rng.uniform(0.0, 30.0)
            for s in senses
        ])
        q = np.concatenate([rng.uniform(0.0, 10.0, n_y), rng.uniform(5.0, 50.0, len(elastic))])
        subs.append(Subperiod(q, T, np.hstack([W, P]), senses, h, weight=rng.uniform(0.5, 2.0)))
    return MultiScaleInstance(fs, subs, name=f"random-{seed}",
                              description=f"n_x={n_x} n_y={n_y} m_sub={m_sub} S={n_subperiods}")
