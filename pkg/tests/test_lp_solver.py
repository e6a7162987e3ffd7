import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cepshed.errors import DimensionMismatch, InputError
from cepshed.lp_solver import Constraint, LinearProgram, LpStatus, Relation, Sense, solve_lp

from oracles import lp_vertex_enumeration

scipy_optimize = pytest.importorskip("scipy.optimize")


def test_small_textbook_lp():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    lp = LinearProgram((3, 5), Sense.MAX, [((1, 0), "<=", 4), ((0, 2), "<=", 12), ((3, 2), "<=", 18)])
    sol = solve_lp(lp)
    assert sol.status is LpStatus.OPTIMAL and sol.optimal
    assert sol.objective_value == pytest.approx(36)
    assert np.allclose(sol.values, [2, 6])
    assert lp.residual(sol.values) <= 1e-9


def test_equality_and_ge_rows():
    lp = LinearProgram((1, 1), Sense.MIN, [((1, 1), ">=", 2), ((1, -1), "==", 0)])
    sol = solve_lp(lp)
    assert sol.objective_value == pytest.approx(2)
    assert np.allclose(sol.values, [1, 1])


def test_infeasible_and_unbounded():
    bad = solve_lp(LinearProgram((1,), Sense.MIN, [((1,), "<=", -1)]))
    assert bad.status is LpStatus.INFEASIBLE and math.isnan(bad.objective_value)
    up = solve_lp(LinearProgram((1, 1), Sense.MAX, [((1, -1), "<=", 1)]))
    assert up.status is LpStatus.UNBOUNDED and up.objective_value == math.inf
    down = solve_lp(LinearProgram((1,), Sense.MIN, bounds=[(-math.inf, 3)]))
    assert down.status is LpStatus.UNBOUNDED and down.objective_value == -math.inf


def test_free_and_shifted_bounds():
    lp = LinearProgram((1, -1), Sense.MIN, [((1, 1), "==", 1)], [(-math.inf, math.inf), (-2, 5)])
    sol = solve_lp(lp)
    assert sol.objective_value == pytest.approx(-9)
    assert np.allclose(sol.values, [-4, 5])


def test_validation():
    with pytest.raises(DimensionMismatch):
        LinearProgram((1, 2), constraints=[((1,), "<=", 1)])
    with pytest.raises(DimensionMismatch):
        LinearProgram((1, 2), bounds=[(0, 1)])
    with pytest.raises(InputError):
        LinearProgram((1,), bounds=[(2, 1)])
    with pytest.raises(InputError):
        LinearProgram((math.nan,))
    with pytest.raises(InputError):
        Relation.parse("<>")
    assert Constraint((1,), "ge", 0).relation is Relation.GE


def test_degenerate_cycling_example():
    # a classic instance on which naive Dantzig pricing cycles
    c = (-0.75, 150, -0.02, 6)
    rows = [((0.25, -60, -0.04, 9), "<=", 0), ((0.5, -90, -0.02, 3), "<=", 0), ((0, 0, 1, 0), "<=", 1)]
    sol = solve_lp(LinearProgram(c, Sense.MIN, rows))
    assert sol.objective_value == pytest.approx(-0.05)


def test_loss_relaxation_of_memory_example():
    # drop fractions y_i for Q1..Q3 and keep fractions x for A..E; unit memory rates, M = 3
    members = [(0, 2), (2, 4), (0, 1, 2, 3)]
    weights = [2.0, 4.0, 6.0]
    n, nq = 5, 3
    obj = [0.0] * n + weights
    cons = [(tuple([1.0] * n + [0.0] * nq), "<=", 3.0)]
    for i, mem in enumerate(members):
        for j in mem:
            row = [0.0] * (n + nq)
            row[j] = 1.0
            row[n + i] = 1.0
            cons.append((tuple(row), ">=", 1.0))
    sol = solve_lp(LinearProgram(obj, Sense.MIN, cons, [(0, 1)] * (n + nq)))
    c = np.array(obj)
    A = [-np.array(r) for r, _, _ in cons[1:]] + [np.array(cons[0][0])]
    b = [-1.0] * (len(cons) - 1) + [3.0]
    oracle = -lp_vertex_enumeration(-c, A, b, [0] * 8, [1] * 8, "max")
    assert sol.objective_value == pytest.approx(oracle, abs=1e-9)
    assert sol.objective_value == pytest.approx(4.8, abs=1e-9)


def test_trivial_lps():
    one = solve_lp(LinearProgram((1,), Sense.MAX, [((1,), "<=", 1)]))
    assert one.objective_value == 1 and list(one.values) == [1]
    dom = solve_lp(LinearProgram((2, 3), Sense.MAX, [((1, 1), "<=", 1)], [(0, 1), (0, 1)]))
    assert dom.objective_value == pytest.approx(3) and np.allclose(dom.values, [0, 1])


@given(st.integers(0, 10_000))
def test_random_lps_agree_with_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    m = int(rng.integers(1, 4))
    c = rng.normal(size=n)
    A = rng.normal(size=(m, n))
    b = rng.uniform(0.0, 3.0, m)
    lp = LinearProgram(tuple(c), Sense.MAX, [(tuple(r), "<=", bi) for r, bi in zip(A, b)], [(0, 2)] * n)
    sol = solve_lp(lp)
    expected = lp_vertex_enumeration(c, A, b, [0] * n, [2] * n, "max")
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(expected, abs=1e-7)
    assert lp.residual(sol.values) <= 1e-9


@given(st.integers(0, 10_000))
def test_random_lps_agree_with_scipy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    m = int(rng.integers(1, 6))
    c = rng.integers(-5, 6, n).astype(float)
    A = rng.integers(-3, 4, (m, n)).astype(float)
    b = rng.integers(-2, 8, m).astype(float)
    rel = rng.choice(["<=", ">=", "=="], m, p=[0.6, 0.3, 0.1])
    lp = LinearProgram(tuple(c), Sense.MIN, [(tuple(r), s, bi) for r, s, bi in zip(A, rel, b)],
                       [(-1, 3)] * n)
    sol = solve_lp(lp)
    ub = [(r, bi) for r, s, bi in zip(A, rel, b) if s == "<="] + [(-r, -bi) for r, s, bi in zip(A, rel, b) if s == ">="]
    eq = [(r, bi) for r, s, bi in zip(A, rel, b) if s == "=="]
    ref = scipy_optimize.linprog(
        c,
        A_ub=np.array([r for r, _ in ub]) if ub else None, b_ub=[v for _, v in ub] if ub else None,
        A_eq=np.array([r for r, _ in eq]) if eq else None, b_eq=[v for _, v in eq] if eq else None,
        bounds=[(-1, 3)] * n, method="highs",
    )
    if ref.status == 2:
        assert sol.status is LpStatus.INFEASIBLE
    else:
        assert sol.status is LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(ref.fun, abs=1e-7)
        assert lp.residual(sol.values) <= 1e-8


@given(st.integers(0, 10_000))
def test_weak_duality_gap_is_zero(seed):
    # primal max c.x, Ax <= b, x >= 0 ; dual min b.u, A^T u >= c, u >= 0
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    A = rng.uniform(0.1, 2.0, (m, n))
    b = rng.uniform(0.5, 3.0, m)
    c = rng.uniform(0.0, 2.0, n)
    primal = solve_lp(LinearProgram(tuple(c), Sense.MAX, [(tuple(r), "<=", v) for r, v in zip(A, b)]))
    dual = solve_lp(LinearProgram(tuple(b), Sense.MIN, [(tuple(col), ">=", v) for col, v in zip(A.T, c)]))
    assert primal.objective_value == pytest.approx(dual.objective_value, abs=1e-8)
