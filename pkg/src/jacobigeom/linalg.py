"""Exact dense linear algebra over Fractions or rational functions.

Matrices are lists of rows. Entries only need field arithmetic and a zero
test, so the same routines serve pointwise (Fraction) and symbolic
(:class:`~jacobigeom.expr.ScalarExpr`) computations.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

Matrix = list[list[Any]]


class SingularMatrixError(ArithmeticError):
    pass


def _zero(x) -> bool:
    z = getattr(x, "is_zero", None)
    return bool(z) if z is not None else x == 0


def _reciprocal(x):
    return Fraction(1) / x if isinstance(x, (int, Fraction)) else x.inverse()


def _pick_pivot(col: list) -> int | None:
    # prefer constants to keep symbolic elimination cheap
    best = None
    for r, x in enumerate(col):
        if _zero(x):
            continue
        if getattr(x, "is_constant", True):
            return r
        if best is None:
            best = r
    return best


def rref(A: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(row) for row in A]
    if not M:
        return M, []
    rows, cols = len(M), len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = _pick_pivot([M[i][c] for i in range(r, rows)])
        if p is None:
            continue
        p += r
        M[r], M[p] = M[p], M[r]
        inv = _reciprocal(M[r][c])
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and not _zero(M[i][c]):
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], zero=Fraction(0), one=Fraction(1)) -> list[list]:
    """Basis of ``{x : A x = 0}`` as a list of column vectors."""
    R, pivots = rref(A)
    cols = len(A[0]) if A else 0
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * cols
        v[f] = one
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def inverse(A: Sequence[Sequence], zero=Fraction(0), one=Fraction(1)) -> Matrix:
    n = len(A)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in R]


def solve(A: Sequence[Sequence], b: Sequence) -> list:
    """Unique solution of a square system ``A x = b``."""
    n = len(A)
    aug = [list(row) + [b[i]] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [R[i][n] for i in range(n)]


def det(A: Sequence[Sequence], zero=Fraction(0), one=Fraction(1)):
    """Determinant by fraction-carrying elimination."""
    M = [list(row) for row in A]
    n = len(M)
    result = one
    for c in range(n):
        p = _pick_pivot([M[i][c] for i in range(c, n)])
        if p is None:
            return zero
        p += c
        if p != c:
            M[c], M[p] = M[p], M[c]
            result = -result
        piv = M[c][c]
        result = result * piv
        for i in range(c + 1, n):
            if not _zero(M[i][c]):
                f = M[i][c] * _reciprocal(piv)
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return result


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = None
            for k, a in enumerate(row):
                if _zero(a) or _zero(B[k][j]):
                    continue
                t = a * B[k][j]
                acc = t if acc is None else acc + t
            new.append(acc if acc is not None else row[0] * 0 if row else 0)
        out.append(new)
    return out


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*A)]


def identity(n: int, zero=Fraction(0), one=Fraction(1)) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]
