import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rank1_landscape.criticality import is_critical_lp
from rank1_landscape.rational_lp import (
    BoxLinearSystem,
    LpStatus,
    MalformedSystem,
    solve_feasibility,
    solve_min,
)
from rank1_landscape.subdiff import SignValue, sign_matrix


def test_one_var_feasible():
    out = solve_feasibility(BoxLinearSystem(1, [([1], 1)], [-1], [1]))
    assert out.status is LpStatus.FEASIBLE
    assert out.witness == (F(1),)


def test_one_var_infeasible():
    out = solve_feasibility(BoxLinearSystem(1, [([1], 2)], [-1], [1]))
    assert out.status is LpStatus.INFEASIBLE


def test_decoy_multiplier_system_infeasible(decoy):
    # all four entries as box variables, Lambda y = 0 and Lambda^T x = 0
    I, p = decoy
    S = [s for row in sign_matrix(I, p) for s in row]
    assert S == [SignValue.MINUS_ONE, SignValue.FULL_INTERVAL,
                 SignValue.FULL_INTERVAL, SignValue.MINUS_ONE]
    lower = [s.bounds[0] for s in S]
    upper = [s.bounds[1] for s in S]
    (x1, x2), (y1, y2) = p.x, p.y
    eqs = [
        ([y1, y2, 0, 0], 0),
        ([0, 0, y1, y2], 0),
        ([x1, 0, x2, 0], 0),
        ([0, x1, 0, x2], 0),
    ]
    out = solve_feasibility(BoxLinearSystem(4, eqs, lower, upper))
    assert out.status is LpStatus.INFEASIBLE
    assert not is_critical_lp(I, p).is_critical


def test_min_examples():
    out = solve_min(BoxLinearSystem(1, (), [-1], [1]), [1])
    assert out.status is LpStatus.OPTIMAL and out.objective_value == -1
    out = solve_min(BoxLinearSystem(1, (), [0], [math.inf]), [1])
    assert out.status is LpStatus.OPTIMAL and out.objective_value == 0
    out = solve_min(BoxLinearSystem(1, (), [0], [math.inf]), [-1])
    assert out.status is LpStatus.UNBOUNDED


def test_free_variables():
    # x - y = 3 with x, y free; min x + y subject to x <= 1 is unbounded below
    out = solve_min(BoxLinearSystem(2, [([1, -1], 3)], [None, None], [1, None]), [1, 1])
    assert out.status is LpStatus.UNBOUNDED
    out = solve_min(BoxLinearSystem(2, [([1, -1], 3)], [None, 0], [None, None]), [1, 1])
    assert out.status is LpStatus.OPTIMAL
    assert out.objective_value == 3 and out.witness == (F(3), F(0))
    out = solve_min(BoxLinearSystem(2, [([1, -1], 3)], [None, 0], [1, None]), [1, 1])
    assert out.status is LpStatus.INFEASIBLE


def test_malformed():
    with pytest.raises(MalformedSystem):
        BoxLinearSystem(2, [([1], 0)], [0, 0], [1, 1])
    with pytest.raises(MalformedSystem):
        BoxLinearSystem(1, (), [2], [1])
    with pytest.raises((MalformedSystem, TypeError)):
        BoxLinearSystem(1, [([0.5], 0)], [0], [1])


# --- brute-force vertex oracle ---------------------------------------------


def _unique_solution(A, b):
    """Exact Gauss-Jordan: the unique solution of A z = b, else None."""
    rows = [list(r) + [rhs] for r, rhs in zip(A, b)]
    ncols = len(A[0]) if A else 0
    piv_cols, r = [], 0
    for c in range(ncols):
        k = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        pv = rows[r][c]
        rows[r] = [a / pv for a in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(row[-1] for row in rows[r:]):
        return None
    if len(piv_cols) != ncols:
        return None
    return [rows[i][-1] for i in range(ncols)]


def _vertices(A, b, lo, hi):
    n, k = len(lo), len(A)
    for size in range(min(n, k) + 1):
        for basic in itertools.combinations(range(n), size):
            rest = [j for j in range(n) if j not in basic]
            for choice in itertools.product((0, 1), repeat=len(rest)):
                z = [None] * n
                for j, c in zip(rest, choice):
                    z[j] = hi[j] if c else lo[j]
                rhs = [bi - sum(row[j] * z[j] for j in rest) for row, bi in zip(A, b)]
                if basic:
                    sol = _unique_solution([[row[j] for j in basic] for row in A], rhs)
                    if sol is None:
                        continue
                    for j, s in zip(basic, sol):
                        z[j] = s
                elif any(rhs):
                    continue
                if all(lo[j] <= z[j] <= hi[j] for j in range(n)):
                    yield z


small = st.integers(-3, 3).map(F)


@st.composite
def box_systems(draw):
    n = draw(st.integers(1, 4))
    k = draw(st.integers(0, 2))
    A = [[draw(small) for _ in range(n)] for _ in range(k)]
    b = [draw(small) for _ in range(k)]
    lo = [draw(st.integers(-2, 1)) for _ in range(n)]
    hi = [l + draw(st.integers(0, 3)) for l in lo]
    c = [draw(small) for _ in range(n)]
    return A, b, [F(a) for a in lo], [F(a) for a in hi], c


@settings(max_examples=300, deadline=None)
@given(box_systems())
def test_matches_vertex_enumeration(case):
    A, b, lo, hi, c = case
    sys = BoxLinearSystem(len(lo), list(zip(A, b)), lo, hi)
    verts = list(_vertices(A, b, lo, hi))
    feas = solve_feasibility(sys)
    assert (feas.status is LpStatus.FEASIBLE) == bool(verts)
    out = solve_min(sys, c)
    if not verts:
        assert out.status is LpStatus.INFEASIBLE
        return
    assert sys.satisfied_by(feas.witness)
    assert out.status is LpStatus.OPTIMAL
    assert sys.satisfied_by(out.witness)
    best = min(sum(ci * zi for ci, zi in zip(c, z)) for z in verts)
    assert out.objective_value == best
    assert sum(ci * zi for ci, zi in zip(c, out.witness)) == best


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_feasible_by_construction(data):
    n = data.draw(st.integers(1, 6))
    k = data.draw(st.integers(1, 5))
    z = [data.draw(st.fractions(-2, 2, max_denominator=4)) for _ in range(n)]
    A = [[data.draw(small) for _ in range(n)] for _ in range(k)]
    eqs = [(row, sum(a * zi for a, zi in zip(row, z))) for row in A]
    lower = [data.draw(st.sampled_from([None, -2])) for _ in range(n)]
    upper = [data.draw(st.sampled_from([None, 2])) for _ in range(n)]
    sys = BoxLinearSystem(n, eqs, lower, upper)
    out = solve_feasibility(sys)
    assert out.status is LpStatus.FEASIBLE
    assert sys.satisfied_by(out.witness)
