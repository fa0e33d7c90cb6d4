import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_lp, solve_lp_by_enumeration

from d2dlan import LpProblem, solve


def test_corner_solution():
    sol = solve(LpProblem(objective=[1.0, 0.0],
                          a_eq=[[1.0, 1.0]], b_eq=[1.0]))
    assert sol.status == "optimal"
    assert sol.x == pytest.approx([0.0, 1.0], abs=1e-9)
    assert sol.objective_value == pytest.approx(0.0, abs=1e-9)


def test_contradictory_constraints():
    sol = solve(LpProblem(objective=[0.0],
                          a_eq=[[1.0]], b_eq=[1.0],
                          a_ub=[[1.0]], b_ub=[0.5]))
    assert sol.status == "infeasible"


def test_bounded_by_inequalities():
    sol = solve(LpProblem(objective=[-1.0, 0.0],
                          a_eq=[[1.0, 1.0]], b_eq=[3.0],
                          a_ub=[[1.0, 0.0], [0.0, 1.0]], b_ub=[2.0, 2.0]))
    assert sol.status == "optimal"
    assert sol.x == pytest.approx([2.0, 1.0], abs=1e-9)
    assert sol.objective_value == pytest.approx(-2.0, abs=1e-9)
    status, best = solve_lp_by_enumeration([-1.0, 0.0],
                                           a_eq=[[1.0, 1.0]], b_eq=[3.0],
                                           a_ub=[[1.0, 0.0], [0.0, 1.0]],
                                           b_ub=[2.0, 2.0])
    assert status == "optimal"
    assert best == pytest.approx(-2.0, abs=1e-9)


def test_unbounded():
    sol = solve(LpProblem(objective=[-1.0]))
    assert sol.status == "unbounded"


def test_trivially_optimal_at_origin():
    sol = solve(LpProblem(objective=[1.0, 2.0]))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(0.0, abs=0)


def test_negative_rhs_handled():
    # x >= 1 written as -x <= -1
    sol = solve(LpProblem(objective=[1.0], a_ub=[[-1.0]], b_ub=[-1.0]))
    assert sol.status == "optimal"
    assert sol.x == pytest.approx([1.0], abs=1e-9)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        LpProblem(objective=[np.nan])
    with pytest.raises(ValueError):
        LpProblem(objective=[1.0], a_ub=[[np.inf]], b_ub=[1.0])


def test_degenerate_symmetric_instance():
    # constant objective over the feasible simplex plus box rows; any vertex
    # is optimal but the solve must still terminate (Bland's rule)
    k = 4
    sol = solve(LpProblem(objective=[2.0] * k,
                          a_eq=[[1.0] * k], b_eq=[1.0],
                          a_ub=np.eye(k), b_ub=[0.5] * k))
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(2.0, abs=1e-9)


def test_solution_satisfies_constraints_within_tolerance():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(200):
        kw = random_lp(rng)
        sol = solve(LpProblem(**kw))
        if sol.status != "optimal":
            continue
        checked += 1
        x = sol.x
        assert np.all(x >= -1e-9)
        if kw["a_eq"].size:
            assert np.max(np.abs(kw["a_eq"] @ x - kw["b_eq"])) <= 1e-8
        if kw["a_ub"].size:
            assert np.max(kw["a_ub"] @ x - kw["b_ub"]) <= 1e-8
        assert sol.objective_value == pytest.approx(float(kw["objective"] @ x),
                                                    rel=1e-12, abs=1e-12)
    assert checked > 40


def test_against_enumeration_oracle():
    rng = np.random.default_rng(5)
    agree = 0
    for _ in range(150):
        kw = random_lp(rng)
        sol = solve(LpProblem(**kw))
        status, best = solve_lp_by_enumeration(
            kw["objective"], a_eq=kw["a_eq"], b_eq=kw["b_eq"],
            a_ub=kw["a_ub"], b_ub=kw["b_ub"])
        assert sol.status == status, (kw, sol.status, status)
        if status == "optimal":
            assert sol.objective_value == pytest.approx(best, abs=1e-6)
        agree += 1
    assert agree == 150


@settings(max_examples=30, deadline=None)
@given(scale=st.floats(min_value=0.01, max_value=100.0),
       seed=st.integers(min_value=0, max_value=2**16))
def test_feasibility_invariant_under_row_scaling(scale, seed):
    rng = np.random.default_rng(seed)
    kw = random_lp(rng)
    base = solve(LpProblem(**kw))
    scaled = solve(LpProblem(
        objective=kw["objective"],
        a_eq=kw["a_eq"] * scale, b_eq=kw["b_eq"] * scale,
        a_ub=kw["a_ub"] * scale, b_ub=kw["b_ub"] * scale))
    assert (base.status == "infeasible") == (scaled.status == "infeasible")
