from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, strategies as st

from jacobigeom.expr import Chart
from jacobigeom.linalg import SingularMatrixError, det, identity, inverse, matmul, nullspace, rank, rref, solve

small = st.integers(-4, 4).map(F)


def test_inverse_and_solve():
    A = [[F(2), F(1)], [F(1), F(1)]]
    assert inverse(A) == [[F(1), F(-1)], [F(-1), F(2)]]
    assert solve(A, [F(3), F(2)]) == [F(1), F(1)]
    assert det(A) == 1


def test_singular():
    A = [[F(1), F(2)], [F(2), F(4)]]
    assert rank(A) == 1
    with pytest.raises(SingularMatrixError):
        inverse(A)
    (v,) = nullspace(A)
    assert matmul(A, [[x] for x in v]) == [[0], [0]]


def test_symbolic_entries():
    C = Chart("c", ("x",))
    x, one, z = C.var("x"), C.one(), C.zero()
    A = [[one, x], [z, one + x]]
    Ai = inverse(A, z, one)
    prod = matmul(A, Ai)
    assert prod == [[one, z], [z, one]]


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_against_sympy(A):
    M = sympy.Matrix(A)
    assert rank(A) == M.rank()
    assert det(A) == M.det()
    if M.det() != 0:
        assert matmul(A, inverse(A)) == identity(len(A))
    R, pivots = rref(A)
    assert len(pivots) == M.rank()
    for v in nullspace(A):
        assert all(x == 0 for row in matmul(A, [[x] for x in v]) for x in row)
