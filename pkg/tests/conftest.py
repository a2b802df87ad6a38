import numpy as np
import pytest

from msopt.lp import EQ, GE, LE, LinearProgram
from msopt.model import CapacityInstance, FirstStage, MultiScaleInstance, Subperiod, generate_random_instance

SUITE_SIZE = 100
SUITE_MAX_DIMS = (3, 4, 4, 4)


def tiny1():
    return MultiScaleInstance(FirstStage([1.0]), [Subperiod([3.0], [[1.0]], [[1.0]], [GE], [1.0])],
                              name="tiny-1")


def tiny2():
    return MultiScaleInstance(
        FirstStage([1.0]),
        [Subperiod([3.0], [[1.0]], [[1.0]], [GE], [1.0]),
         Subperiod([0.5], [[1.0]], [[1.0]], [GE], [2.0])],
        name="tiny-2")


def tiny3():
    # y >= 1 and y <= x: infeasible whenever x < 1
    sub = Subperiod([0.0], [[0.0], [-1.0]], [[1.0], [1.0]], [GE, LE], [1.0, 0.0])
    return MultiScaleInstance(FirstStage([1.0]), [sub], name="tiny-3")


def micro_capacity():
    return CapacityInstance(a=np.ones((2, 1, 1)), c=[1.0], d=[[1.0], [2.0]], f=[[1.0]], g=[10.0, 10.0],
                            name="micro")


def suite_dims(seed):
    rng = np.random.default_rng(10_000 + seed)
    return tuple(int(v) for v in rng.integers(1, np.array(SUITE_MAX_DIMS) + 1))


def suite_instance(seed):
    return generate_random_instance(seed, *suite_dims(seed))


def random_capacity(seed, J=2, I=3, S=3):
    rng = np.random.default_rng(seed)
    return CapacityInstance(
        a=rng.uniform(0.2, 1.0, (S, I, J)),
        c=rng.uniform(1.0, 5.0, J),
        d=rng.uniform(10.0, 50.0, (S, I)),
        f=rng.uniform(0.5, 3.0, (I, J)),
        g=rng.uniform(20.0, 40.0, S),
        name=f"cap-{seed}",
    )


def random_tiny_lp(seed):
    """Feasible, bounded LP with n <= 3 variables and m <= 5 rows."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 6))
    A = rng.integers(-3, 4, (m, n)).astype(float)
    lower = rng.integers(-2, 1, n).astype(float)
    upper = lower + rng.integers(1, 5, n)
    x0 = lower + rng.random(n) * (upper - lower)
    senses = [str(s) for s in rng.choice([LE, GE, EQ], m, p=[0.45, 0.45, 0.1])]
    act = A @ x0
    slack = rng.integers(0, 3, m)
    rhs = np.where(np.array(senses) == LE, np.ceil(act) + slack,
                   np.where(np.array(senses) == GE, np.floor(act) - slack, act))
    c = rng.integers(-5, 6, n).astype(float)
    return LinearProgram(c, A, senses, rhs, lower, upper)


def random_any_lp(seed):
    """LP that may be optimal, infeasible or unbounded."""
    rng = np.random.default_rng(50_000 + seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 5))
    A = rng.integers(-3, 4, (m, n)).astype(float)
    senses = [str(s) for s in rng.choice([LE, GE, EQ], m)]
    rhs = rng.integers(-4, 5, m).astype(float)
    c = rng.integers(-3, 4, n).astype(float)
    lower = np.where(rng.random(n) < 0.2, -np.inf, 0.0)
    upper = np.where(rng.random(n) < 0.5, np.inf, 3.0)
    return LinearProgram(c, A, senses, rhs, lower, upper)


@pytest.fixture
def tiny2_inst():
    return tiny2()


@pytest.fixture
def micro():
    return micro_capacity()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
