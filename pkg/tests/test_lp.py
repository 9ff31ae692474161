from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from icregions.polytope.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LPSolver, feasible, maximize, to_mpq

small = st.integers(-4, 4)


@st.composite
def lps(draw):
    m = draw(st.integers(1, 5))
    n = draw(st.integers(1, 4))
    A = [[draw(small) for _ in range(n)] for _ in range(m)]
    b = [draw(st.integers(-3, 6)) for _ in range(m)]
    c = [draw(small) for _ in range(n)]
    return c, A, b


@given(lps())
def test_exact_simplex_agrees_with_highs(problem):
    c, A, b = problem
    ours = maximize(c, A, b)
    status, val = oracles.lp_max(c, A, b)
    assert ours.status == status
    if status == OPTIMAL:
        assert float(ours.value) == pytest.approx(val, abs=1e-7)
        x = np.array([float(v) for v in ours.x])
        assert np.all(x >= 0)
        assert np.all(np.array(A, float) @ x <= np.array(b, float) + 1e-12)


def test_degenerate_cycling_example():
    # classic Beale-style degenerate problem; Bland's rule must terminate
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [
        [Fraction(1, 4), -60, Fraction(-1, 25), 9],
        [Fraction(1, 2), -90, Fraction(-1, 50), 3],
        [0, 0, 1, 0],
    ]
    b = [0, 0, 1]
    res = maximize(c, A, b)
    assert res.status == OPTIMAL
    assert res.value == Fraction(1, 20)


def test_status_values():
    assert maximize([1], [[-1]], [-1]).status == UNBOUNDED
    assert maximize([1], [[1], [-1]], [1, -2]).status == INFEASIBLE
    assert not feasible([[1], [-1]], [1, -2])
    assert maximize([1, 0], [], []).status == UNBOUNDED


def test_solver_reuse_across_objectives():
    s = LPSolver([[1, 1], [1, 0]], [2, 1])
    assert s.maximize([1, 0]).value == 1
    assert s.maximize([0, 1]).value == 2
    assert s.maximize([1, 1]).value == 2


def test_shape_mismatch():
    with pytest.raises(ValueError):
        LPSolver([[1, 2], [1]], [1, 1])


def test_float_rounding_grid():
    assert to_mpq(0.5) == Fraction(1, 2)
    assert to_mpq(Fraction(1, 3)) * 3 == 1
