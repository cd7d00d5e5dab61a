import itertools
from fractions import Fraction

from hypothesis import given, strategies as st

from bkcheck.linalg import det, inverse, rank, rref
from bkcheck.lp import feasible_point, linprog_exact


def test_simple_optimum():
    # max x + y, x + 2y + s = 4, 3x + y + t = 6
    res = linprog_exact([1, 1, 0, 0], [[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6])
    assert res.status == "optimal" and res.value == Fraction(14, 5)


def test_infeasible_and_unbounded():
    assert linprog_exact([0], [[1]], [-1]).status == "infeasible"
    assert linprog_exact([1, 0], [[1, -1]], [0]).status == "unbounded"


def _vertices_brute(A, b, n):
    """Best objective over basic feasible solutions by enumeration."""
    m = len(A)
    sols = []
    for cols in itertools.combinations(range(n), m):
        sub = [[A[i][j] for j in cols] for i in range(m)]
        if det(sub) == 0:
            continue
        inv = inverse(sub)
        xb = [sum(inv[i][k] * b[k] for k in range(m)) for i in range(m)]
        if all(v >= 0 for v in xb):
            x = [Fraction(0)] * n
            for j, v in zip(cols, xb):
                x[j] = v
            sols.append(x)
    return sols


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=2, max_size=2),
       st.lists(st.integers(0, 5), min_size=2, max_size=2),
       st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_against_vertex_enumeration(A, b, c):
    # slack for each row plus a box row sum(x) + t = 20 keeps the problem bounded
    A = [row + [int(i == 0), int(i == 1), 0] for i, row in enumerate(A)]
    A.append([1, 1, 1, 1, 0, 0, 1])
    b = list(b) + [20]
    c = list(c) + [0, 0, 0]
    verts = _vertices_brute(A, b, 7)
    res = linprog_exact(c, A, b)
    if not verts:
        assert res.status == "infeasible"
        return
    best = max(sum(ci * xi for ci, xi in zip(c, x)) for x in verts)
    assert res.status == "optimal" and res.value == best
    assert all(sum(a * x for a, x in zip(row, res.x)) == bi for row, bi in zip(A, b))


def test_feasible_point():
    x = feasible_point([[1, 1]], [3])
    assert x is not None and sum(x) == 3 and min(x) >= 0
    assert feasible_point([[1, 1]], [-3]) is None


def test_linalg_basics():
    m = [[2, 1], [4, 3]]
    assert det(m) == 2 and rank(m) == 2
    inv = inverse(m)
    assert [[sum(m[i][k] * inv[k][j] for k in range(2)) for j in range(2)] for i in range(2)] == \
        [[1, 0], [0, 1]]
    assert rank([[1, 2], [2, 4]]) == 1
    assert det([[1, 2], [2, 4]]) == 0
