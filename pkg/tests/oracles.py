"""Reference computations written directly against sympy.

They share no code with the package: tensors enter as plain sympy matrices
and lists, and every formula is the textbook coordinate expression.
"""
from __future__ import annotations

import itertools

import sympy


def symbols(names):
    return [sympy.Symbol(n) for n in names]


def bivector_matrix(P, xs):
    """``M[i][j] = P(dx_i, dx_j)`` from a package bivector."""
    n = len(xs)
    M = sympy.zeros(n, n)
    for names, c in P.terms():
        i, j = (P.chart.vars.index(v) for v in names)
        val = sympy.sympify(str(c).replace("^", "**"), locals={str(x): x for x in xs})
        M[i, j] += val
        M[j, i] -= val
    return M


def vector_list(X, xs):
    out = [sympy.Integer(0)] * len(xs)
    for (v,), c in X.terms():
        out[X.chart.vars.index(v)] = sympy.sympify(str(c).replace("^", "**"), locals={str(x): x for x in xs})
    return out


def jacobi_bracket(M, E, xs, f, g):
    """``{f, g} = Lambda(df, dg) + f E(g) - g E(f)``."""
    n = len(xs)
    Ef = sum(E[i] * sympy.diff(f, xs[i]) for i in range(n))
    Eg = sum(E[i] * sympy.diff(g, xs[i]) for i in range(n))
    core = sum(M[i, j] * sympy.diff(f, xs[i]) * sympy.diff(g, xs[j]) for i in range(n) for j in range(n))
    return sympy.expand(core + f * Eg - g * Ef)


def jacobiator(M, E, xs, f, g, h):
    b = lambda a, c: jacobi_bracket(M, E, xs, a, c)
    return sympy.simplify(b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g)))


def lie_derivative_bivector(X, M, xs):
    """``(L_X P)^{ij} = X(P^{ij}) - P^{lj} d_l X^i - P^{il} d_l X^j``."""
    n = len(xs)
    out = sympy.zeros(n, n)
    for i, j in itertools.product(range(n), repeat=2):
        out[i, j] = sympy.simplify(
            sum(X[l] * sympy.diff(M[i, j], xs[l]) for l in range(n))
            - sum(M[l, j] * sympy.diff(X[i], xs[l]) for l in range(n))
            - sum(M[i, l] * sympy.diff(X[j], xs[l]) for l in range(n)))
    return out


def vector_lie_bracket(X, Y, xs):
    n = len(xs)
    return [sympy.simplify(sum(X[l] * sympy.diff(Y[i], xs[l]) - Y[l] * sympy.diff(X[i], xs[l]) for l in range(n)))
            for i in range(n)]


def deformed_sharp(J, S):
    """``J (I + S J)^-1`` with sympy's own inverse."""
    n = J.shape[0]
    return sympy.simplify(J * (sympy.eye(n) + S * J).inv())


def flat_matrix(eta, theta):
    """Matrix of ``D -> i_D (eta + 1* ^ theta)`` for a degree-2 LForm.

    ``eta`` is the antisymmetric coefficient matrix (``eta = 1/2 eta_ij dx^i ^ dx^j``)
    and ``theta`` the list of components of the 1-form. Columns are the
    derivations ``d_1, ..., d_n, 1``; rows the jets ``dx^1, ..., dx^n, 1*``:
    ``i_(d_i) sigma = eta_ij dx^j - theta_i 1*`` and ``i_1 sigma = theta``.
    """
    n = len(theta)
    S = sympy.zeros(n + 1, n + 1)
    for i in range(n):
        for j in range(n):
            S[j, i] = eta[i, j]
        S[n, i] = -theta[i]
        S[i, n] = theta[i]
    return S


def form_matrix(w, xs, extra=None):
    """Antisymmetric coefficient matrix of a package 2-form."""
    loc = {str(x): x for x in xs}
    loc.update(extra or {})
    n = len(xs)
    M = sympy.zeros(n, n)
    for names, c in w.terms():
        i, j = (w.chart.vars.index(v) for v in names)
        val = sympy.sympify(str(c).replace("^", "**"), locals=loc)
        M[i, j] += val
        M[j, i] -= val
    return M


def form_list(w, xs, extra=None):
    loc = {str(x): x for x in xs}
    loc.update(extra or {})
    out = [sympy.Integer(0)] * len(xs)
    for (v,), c in w.terms():
        out[w.chart.vars.index(v)] = sympy.sympify(str(c).replace("^", "**"), locals=loc)
    return out
