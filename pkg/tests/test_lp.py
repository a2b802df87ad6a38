import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_any_lp, random_tiny_lp
from msopt.lp import (GE, LE, LinearProgram, LpSolution, LpStatus, MaxPivotsExceeded, Row,
                      ShapeMismatch, SolveOptions, solve_lp, verify_certificate)
from oracles import scipy_solve, vertex_enumeration


def lp1():
    return LinearProgram.from_rows([-1.0], [Row({0: 1.0}, LE, 2.0)])


def test_bound_active_example():
    sol = solve_lp(lp1())
    assert sol.status is LpStatus.OPTIMAL
    assert sol.primal[0] == pytest.approx(2.0)
    assert sol.objective == pytest.approx(-2.0)
    assert sol.duals[0] == pytest.approx(-1.0)
    assert verify_certificate(lp1(), sol)


def test_identity_example():
    lp = LinearProgram.from_rows([1.0], [Row({0: 1.0}, GE, 1.0)])
    sol = solve_lp(lp)
    assert sol.optimal and sol.objective == pytest.approx(1.0)
    assert sol.duals[0] == pytest.approx(1.0)


def test_infeasible_example_has_farkas_ray():
    lp = LinearProgram.from_rows([1.0], [Row({0: 1.0}, LE, -1.0)])
    sol = solve_lp(lp)
    assert sol.status is LpStatus.INFEASIBLE
    assert sol.primal is None and sol.farkas_ray is not None
    assert verify_certificate(lp, sol)


def test_unbounded_example_has_ray():
    lp = LinearProgram(np.array([-1.0]), np.zeros((0, 1)), [], np.zeros(0), [0.0], [np.inf])
    sol = solve_lp(lp)
    assert sol.status is LpStatus.UNBOUNDED
    np.testing.assert_allclose(sol.primal_ray, [1.0])
    assert verify_certificate(lp, sol)


def test_perturbed_primal_is_reported():
    lp = lp1()
    sol = solve_lp(lp)
    bad = LpSolution(sol.status, sol.primal + 1.0, sol.duals, sol.objective)
    verdict = verify_certificate(lp, bad)
    assert not verdict.valid
    assert verdict.condition == "primal feasibility"
    assert verdict.magnitude == pytest.approx(1.0 / (1 + 2.0))  # relative to 1 + |rhs|


def test_shape_mismatch():
    sol = solve_lp(lp1())
    with pytest.raises(ShapeMismatch):
        verify_certificate(lp1(), LpSolution(sol.status, np.zeros(3), sol.duals, sol.objective))


def test_invariants_rejected():
    with pytest.raises(ValueError):
        LinearProgram.from_rows([1.0], [Row({3: 1.0}, LE, 1.0)])
    with pytest.raises(ValueError):
        LinearProgram(np.array([1.0]), np.zeros((0, 1)), [], np.zeros(0), [2.0], [1.0])
    with pytest.raises(ValueError):
        LinearProgram(np.array([np.nan]), np.zeros((0, 1)), [], np.zeros(0), [0.0], [1.0])


@pytest.mark.parametrize("seed", range(200))
def test_matches_vertex_enumeration(seed):
    lp = random_tiny_lp(seed)
    sol = solve_lp(lp)
    best, _ = vertex_enumeration(lp)
    assert best is not None
    assert sol.status is LpStatus.OPTIMAL
    assert abs(sol.objective - best) <= 1e-6
    assert verify_certificate(lp, sol), verify_certificate(lp, sol).details


def test_mixed_status_suite_certificates_and_scipy_agree():
    seen = set()
    for seed in range(300):
        lp = random_any_lp(seed)
        sol = solve_lp(lp)
        verdict = verify_certificate(lp, sol)
        assert verdict.valid, (seed, verdict)
        status, obj = scipy_solve(lp)
        assert sol.status.value == status, seed
        if obj is not None:
            assert sol.objective == pytest.approx(obj, abs=1e-6)
        seen.add(sol.status)
    assert seen == set(LpStatus)


def test_deterministic():
    for seed in range(20):
        lp = random_any_lp(seed)
        a, b = solve_lp(lp), solve_lp(lp)
        assert a.status is b.status
        for f in ("primal", "duals", "farkas_ray", "primal_ray"):
            va, vb = getattr(a, f), getattr(b, f)
            assert (va is None and vb is None) or np.array_equal(va, vb)


def test_degenerate_cycling_example_terminates():
    # Beale's classic cycling example under the textbook Dantzig rule
    c = [-0.75, 150.0, -0.02, 6.0]
    A = np.array([[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]])
    lp = LinearProgram(np.array(c), A, [LE] * 3, np.array([0.0, 0.0, 1.0]), np.zeros(4), np.full(4, np.inf))
    sol = solve_lp(lp)
    assert sol.optimal and sol.objective == pytest.approx(-0.05)
    assert verify_certificate(lp, sol)


def test_max_pivots():
    lp = random_tiny_lp(3)
    with pytest.raises(MaxPivotsExceeded):
        solve_lp(lp, SolveOptions(max_pivots=0))


def test_lp_text_dump():
    text = lp1().to_lp_text()
    assert text.startswith("Minimize")
    assert "<= 2.0" in text and "End" in text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_certificate_always_valid(seed):
    lp = random_any_lp(seed)
    assert verify_certificate(lp, solve_lp(lp)).valid


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.1, 10.0))
def test_cost_scaling_scales_objective(seed, k):
    lp = random_tiny_lp(seed)
    scaled = LinearProgram(lp.costs * k, lp.A, lp.senses, lp.rhs, lp.lower, lp.upper)
    assert solve_lp(scaled).objective == pytest.approx(k * solve_lp(lp).objective, abs=1e-6 * (1 + k))
