import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import micro_capacity, random_capacity, tiny1, tiny2
from msopt.lp import GE, LE, LpStatus, solve_lp
from msopt.model import (CapacityInstance, DimensionMismatch, FirstStage, MultiScaleInstance, Subperiod,
                         aggregate_capacity_highlevel, build_block, build_fixed_x, build_fullspace,
                         generate_random_instance, lower_capacity, unit_params)
from oracles import capacity_direct


def test_tiny1_structure():
    lp = build_fullspace(tiny1())
    assert (lp.n_vars, lp.n_rows) == (2, 1)


def test_tiny2_fullspace():
    lp = build_fullspace(tiny2())
    assert (lp.n_vars, lp.n_rows) == (3, 2)
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(1.5)
    assert sol.primal[0] == pytest.approx(1.0)


def test_weights_fold_into_costs():
    sub = Subperiod([2.0], [[1.0]], [[1.0]], [GE], [1.0], weight=3.0)
    inst = MultiScaleInstance(FirstStage([10.0]), [sub])
    np.testing.assert_allclose(build_fullspace(inst).costs, [10.0, 6.0])


def test_invalid_instances():
    with pytest.raises(ValueError):
        MultiScaleInstance(FirstStage([1.0]), [])
    with pytest.raises(ValueError):
        Subperiod([1.0], [[1.0]], [[1.0]], [GE], [1.0], weight=0.0)
    with pytest.raises(DimensionMismatch):
        MultiScaleInstance(FirstStage([1.0, 1.0]), [Subperiod([1.0], [[1.0]], [[1.0]], [GE], [1.0])])


def test_instances_are_immutable():
    inst = tiny2()
    with pytest.raises(ValueError):
        inst.first_stage.c[0] = 5.0


def test_fixed_x_pins_x():
    lp = build_fixed_x(tiny2(), [0.0])
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(4.0)


def test_block_replicates_first_stage_rows():
    fs = FirstStage([1.0], A=[[1.0]], senses=[LE], b=[5.0])
    inst = MultiScaleInstance(fs, [Subperiod([1.0], [[1.0]], [[1.0]], [GE], [1.0])])
    lp = build_block(inst, 0, [0.5], x_upper=[3.0])
    assert lp.n_rows == 2 and lp.upper[0] == 3.0


def test_capacity_micro_fullspace():
    inst = lower_capacity(micro_capacity())
    sol = solve_lp(build_fullspace(inst))
    assert sol.objective == pytest.approx(7.0)
    assert sol.primal[0] == pytest.approx(2.0)


def test_capacity_counts():
    cap = random_capacity(0, J=2, I=3, S=3)
    inst = lower_capacity(cap)
    for sub in inst.subperiods:
        assert sub.n_y == 9 and sub.n_rows == 9
    assert build_fullspace(inst).n_vars == 2 + 3 * 9


def test_zero_availability_buys_everything():
    cap = CapacityInstance(np.zeros((2, 2, 1)), [1.0], [[1.0, 2.0], [3.0, 4.0]], [[1.0], [1.0]], [5.0, 7.0])
    sol = solve_lp(build_fullspace(lower_capacity(cap)))
    assert sol.objective == pytest.approx(5.0 * 3 + 7.0 * 7)


@pytest.mark.parametrize("seed", range(20))
def test_lowering_matches_direct_transcription(seed):
    cap = random_capacity(seed, J=2, I=2, S=3)
    sol = solve_lp(build_fullspace(lower_capacity(cap)))
    direct, _ = capacity_direct(cap)
    assert sol.objective == pytest.approx(direct, rel=1e-8, abs=1e-6)


def test_aggregate_micro():
    cap = micro_capacity()
    sol = solve_lp(aggregate_capacity_highlevel(cap))
    assert sol.objective == pytest.approx(9.0)
    assert sol.primal[0] == pytest.approx(1.5)
    np.testing.assert_allclose(unit_params(cap), [1.0, 0.0])
    sol = solve_lp(aggregate_capacity_highlevel(cap, [0.75, 0.0]))
    assert sol.primal[0] == pytest.approx(2.0)


def test_aggregate_min_capacity_row():
    cap = random_capacity(1)
    sol = solve_lp(aggregate_capacity_highlevel(cap, [1.0, 1.0, 5.0]))
    assert np.all(sol.primal[:2] >= 5.0 - 1e-9)


def test_aggregate_rejects_wrong_param_count():
    with pytest.raises(DimensionMismatch):
        aggregate_capacity_highlevel(micro_capacity(), [1.0, 1.0, 0.0])


def test_capacity_validation():
    with pytest.raises(ValueError):
        CapacityInstance(np.full((1, 1, 1), 1.5), [1.0], [[1.0]], [[1.0]], [1.0])
    with pytest.raises(DimensionMismatch):
        CapacityInstance(np.ones((1, 1, 1)), [1.0, 2.0], [[1.0]], [[1.0]], [1.0])


def test_generator_deterministic():
    assert generate_random_instance(0, 2, 2, 2, 3) == generate_random_instance(0, 2, 2, 2, 3)
    assert not generate_random_instance(0) == generate_random_instance(1)


def test_generator_rejects_zero_dims():
    with pytest.raises(ValueError):
        generate_random_instance(0, 2, 2, 2, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))
def test_generator_complete_recourse(seed, n_x, n_y, m, S):
    inst = generate_random_instance(seed, n_x, n_y, m, S)
    assert solve_lp(build_fullspace(inst)).status is LpStatus.OPTIMAL
    # every x in the box leaves each subperiod feasible
    rng = np.random.default_rng(seed)
    x = rng.random(n_x) * inst.first_stage.upper
    assert solve_lp(build_fixed_x(inst, x, include_first_stage=False)).status is LpStatus.OPTIMAL
    for sub in inst.subperiods:
        assert np.all(sub.q >= 0)
