import numpy as np
import pytest

from conftest import suite_instance, tiny2
from msopt.dantzig_wolfe import (EXTREME_POINT, EXTREME_RAY, Column, NoImprovingColumn, build_rmp, price,
                                 run_dw)
from msopt.lp import solve_lp
from msopt.model import FirstStage, MultiScaleInstance, Subperiod, build_fullspace, generate_random_instance
from msopt.results import Status


def test_empty_rmp_is_all_artificial():
    sol = solve_lp(build_rmp(tiny2(), [], artificial_cost=1e7))
    assert sol.objective == pytest.approx(2e7)


def test_rmp_rejects_bad_cost():
    with pytest.raises(ValueError):
        build_rmp(tiny2(), [], artificial_cost=0.0)


def test_rmp_with_one_column_per_block_is_convex():
    cols = [price(tiny2(), s, [0.0], 1e30)[0] for s in range(2)]
    lp = build_rmp(tiny2(), cols, 1e7)
    sol = solve_lp(lp)
    # columns 0, 1, then NAC artificials (+, -), then one artificial per convexity row
    conv_art = sol.primal[4:]
    assert np.all(sol.primal >= 0)
    np.testing.assert_allclose(sol.primal[:2] + conv_art, [1.0, 1.0])


def test_identical_x_parts_need_no_artificials():
    cols = [Column(0, EXTREME_POINT, np.array([2.0]), 1.0), Column(1, EXTREME_POINT, np.array([2.0]), 1.0)]
    sol = solve_lp(build_rmp(tiny2(), cols, 1e7))
    assert np.all(sol.primal[2:] <= 1e-12)
    assert sol.objective == pytest.approx(2.0)


def test_price_tiny2_block1():
    col, value = price(tiny2(), 0, [0.0], 1e30)
    assert isinstance(col, Column) and col.kind == EXTREME_POINT
    np.testing.assert_allclose(col.x_part, [1.0])
    assert value == pytest.approx(0.5)
    assert col.cost_part == pytest.approx(0.5)


def test_price_no_improvement():
    res, value = price(tiny2(), 0, [0.0], 0.5)
    assert isinstance(res, NoImprovingColumn) and value == pytest.approx(0.5)


def test_price_returns_ray():
    inst = MultiScaleInstance(FirstStage([1.0]), [Subperiod([-1.0], [[0.0]], [[1.0]], ["GE"], [0.0])] * 2)
    col, value = price(inst, 1, [0.0], 0.0, x_upper=10.0)
    assert col.kind == EXTREME_RAY and value == -np.inf
    assert col.cost_part < 0


def test_run_tiny2():
    res = run_dw(tiny2())
    assert res.status is Status.CONVERGED
    assert res.objective == pytest.approx(1.5)
    np.testing.assert_allclose(res.x, [1.0])


def test_single_subperiod_fast():
    inst = generate_random_instance(4, 2, 2, 2, 1)
    res = run_dw(inst)
    assert res.status is Status.CONVERGED and res.iterations <= 2
    assert res.objective == pytest.approx(solve_lp(build_fullspace(inst)).objective)


def test_artificials_nonzero_when_penalty_too_small():
    res = run_dw(tiny2(), artificial_cost=1e-3)
    assert res.status is Status.ARTIFICIALS_NONZERO


def test_iteration_limit():
    assert run_dw(suite_instance(8), max_iter=1).status is Status.ITERATION_LIMIT


@pytest.mark.parametrize("seed", range(2, 100, 8))
def test_matches_fullspace(seed):
    inst = suite_instance(seed)
    mm = solve_lp(build_fullspace(inst)).objective
    res = run_dw(inst)
    assert res.status is Status.CONVERGED
    assert abs(res.objective - mm) <= 1e-5 * (1 + abs(mm))
    assert res.lower_bound >= res.upper_bound - 1e-6 * (1 + abs(res.upper_bound))
    ubs = res.log.upper_bounds()
    assert np.all(np.diff(ubs[np.isfinite(ubs)]) <= 0)
    fs = inst.first_stage
    assert np.all(fs.A @ res.x <= fs.b + 1e-7)
    assert np.all(res.x >= fs.lower - 1e-9) and np.all(res.x <= fs.upper + 1e-9)
