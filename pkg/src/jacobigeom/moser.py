"""Deformations of a Jacobi tensor by closed 2-forms, and their Moser flows.

A family ``sigma_t`` of dL-closed degree-2 LForms with ``sigma_0 = 0`` deforms
``J#`` into

    J_t# = J# (I + sigma_t^flat J#)^-1

where ``sigma^flat`` sends a derivation ``D`` to ``i_D sigma``. With
``alpha_t = -d/dt i_1 sigma_t`` one has ``d/dt sigma_t = -dL alpha_t`` and
the Moser derivation ``Delta_t = J_t#(alpha_t)`` satisfies the transport
equation ``d/dt J_t + Lie_{Delta_t} J_t = 0``, so its flow carries ``J_t``
back to ``J_0``. (The sign of ``Delta_t`` is tied to the ``flat`` convention
above; :func:`transport_defect` checks it exactly.)

The time variable is a chart parameter, so ``t``-derivatives are exact. Only
the flow probe uses floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import sympy

from .cartan import Derivation, LForm, Multivector, dL, iota, schouten
from .expr import Chart, ExprError, ScalarExpr
from .homog import homogenize
from .jacobi import JacobiPair, pair_from_sharp_matrix, sharp_matrix
from .linalg import SingularMatrixError, identity, inverse, matmul, solve

__all__ = [
    "DeformationFamily",
    "SingularDeformationError",
    "MoserConventionError",
    "flat_matrix",
    "deformed_sharp",
    "deformed_sharp_in_t",
    "moser_alpha",
    "moser_derivation",
    "verify_moser_derivative",
    "MoserDerivativeReport",
    "singular_times",
    "transport_defect",
    "flow_invariance_probe",
    "FlowReport",
]


class SingularDeformationError(ArithmeticError):
    def __init__(self, message: str, t=None, point=None):
        super().__init__(message)
        self.t = t
        self.point = point


class MoserConventionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DeformationFamily:
    """A base Jacobi pair and a closed family ``sigma`` depending on parameter ``t``."""

    base: JacobiPair
    sigma: LForm
    tvar: str = "t"

    def __post_init__(self):
        chart = self.sigma.chart
        if self.sigma.degree != 2:
            raise ExprError("the deformation family consists of degree-2 LForms")
        if self.tvar not in chart.params:
            raise ExprError(f"{self.tvar!r} must be a parameter of the family's chart")
        if chart.vars != self.base.chart.vars:
            raise ExprError("family and base pair must share coordinates")
        if not self.sigma.restrict({self.tvar: 0}).is_zero:
            raise ExprError("the family must vanish at t = 0")
        if not dL(self.sigma).is_zero:
            raise ExprError(f"the family is not dL-closed: dL sigma = {dL(self.sigma)}")

    @property
    def chart(self) -> Chart:
        return self.sigma.chart

    def base_on_family_chart(self) -> JacobiPair:
        return self.base.to_chart(self.chart)


def flat_matrix(w: LForm) -> list[list[ScalarExpr]]:
    """Matrix of ``D -> i_D w`` from the derivation basis to the jet basis."""
    chart = w.chart
    n = chart.dim
    cols = []
    for j in range(n + 1):
        if j < n:
            D = Derivation(Multivector.basis(chart, chart.vars[j]))
        else:
            D = Derivation.identity(chart)
        img = iota(D, w)
        z = chart.zero()
        cols.append([img.plain.coeffs.get((i,), z) for i in range(n)] + [img.jet.coeffs.get((), z)])
    return [[cols[j][i] for j in range(n + 1)] for i in range(n + 1)]


def _eval_matrix(M, point) -> list[list[Fraction]]:
    return [[x.eval(point) for x in row] for row in M]


def _point(point: Mapping[str, Fraction]) -> dict[str, Fraction]:
    return {k: Fraction(v) for k, v in point.items()}


def deformed_sharp(D: DeformationFamily, t0, point: Mapping[str, Fraction]) -> list[list[Fraction]]:
    """Exact matrix of ``J_t#`` at time ``t0`` and a point."""
    point = _point(point)
    J = sharp_matrix(D.base, {k: v for k, v in point.items() if k in D.base.chart.vars})
    S = _eval_matrix(flat_matrix(D.sigma), {**point, D.tvar: Fraction(t0)})
    n1 = len(J)
    A = [[identity(n1)[i][j] + sum(S[i][k] * J[k][j] for k in range(n1)) for j in range(n1)]
         for i in range(n1)]
    try:
        Ainv = inverse(A)
    except SingularMatrixError:
        raise SingularDeformationError(
            f"I + sigma^flat J# is singular at t = {Fraction(t0)}", Fraction(t0), point) from None
    return matmul(J, Ainv)


def deformed_sharp_in_t(D: DeformationFamily, point: Mapping[str, Fraction]) -> list[list[ScalarExpr]]:
    """``J_t#`` at a point as a matrix of rational functions of ``t``."""
    point = _point(point)
    chart = D.chart
    J = [[chart.const(x) for x in row] for row in
         sharp_matrix(D.base, {k: v for k, v in point.items() if k in D.base.chart.vars})]
    S = [[x.restrict(point) for x in row] for row in flat_matrix(D.sigma)]
    n1 = len(J)
    z, one = chart.zero(), chart.one()
    A = [[(one if i == j else z) + _dot([S[i][k] for k in range(n1)], [J[k][j] for k in range(n1)], z)
          for j in range(n1)] for i in range(n1)]
    try:
        Ainv = inverse(A, z, one)
    except SingularMatrixError:
        raise SingularDeformationError("I + sigma^flat J# is singular for all t", None, point) from None
    return [[_dot(J[i], [Ainv[k][j] for k in range(n1)], z) for j in range(n1)] for i in range(n1)]


def _dot(a, b, zero):
    out = zero
    for x, y in zip(a, b):
        if not x.is_zero and not y.is_zero:
            out = out + x * y
    return out


def moser_alpha(D: DeformationFamily) -> LForm:
    """``alpha_t = -d/dt i_1 sigma_t``; checks ``d/dt sigma_t = -dL alpha_t``."""
    one = Derivation.identity(D.chart)
    alpha = -iota(one, D.sigma).partial(D.tvar)
    if dL(alpha) != -D.sigma.partial(D.tvar):
        raise MoserConventionError("d/dt sigma_t differs from -dL alpha_t for a closed family")
    return alpha


def _jet_vector(w: LForm, point) -> list[Fraction]:
    chart = w.chart
    z = chart.zero()
    comps = [w.plain.coeffs.get((i,), z) for i in range(chart.dim)] + [w.jet.coeffs.get((), z)]
    return [c.eval(point) for c in comps]


def moser_derivation(D: DeformationFamily, t0, point: Mapping[str, Fraction]) -> list[Fraction]:
    """Fiber components of ``Delta_t = J_t#(alpha_t)`` in the basis ``(d_i, 1)``."""
    point = _point(point)
    Jt = deformed_sharp(D, t0, point)
    a = _jet_vector(moser_alpha(D), {**point, D.tvar: Fraction(t0)})
    return [sum(Jt[i][k] * a[k] for k in range(len(a))) for i in range(len(Jt))]


@dataclass(frozen=True)
class MoserDerivativeReport:
    t0: Fraction
    h: Fraction
    fd_deviation: float
    exact_identity: bool
    rhs: tuple[tuple[Fraction, ...], ...]

    @property
    def passed(self) -> bool:
        return self.exact_identity


def verify_moser_derivative(D: DeformationFamily, t0, point: Mapping[str, Fraction], h) -> MoserDerivativeReport:
    """Compare ``dJ_t#/dt`` with ``J_t# (dL alpha_t)^flat J_t#``.

    The comparison is done twice: exactly in ``t`` (as rational functions,
    against ``-J_t# (d sigma/dt)^flat J_t#``) and by a central difference
    with step ``h`` at ``t0``.
    """
    point = _point(point)
    t0, h = Fraction(t0), Fraction(h)
    chart = D.chart
    tp = {**point, D.tvar: t0}
    Jt = deformed_sharp(D, t0, point)
    A = _eval_matrix(flat_matrix(dL(moser_alpha(D))), tp)
    rhs = matmul(matmul(Jt, A), Jt)
    plus, minus = deformed_sharp(D, t0 + h, point), deformed_sharp(D, t0 - h, point)
    n1 = len(Jt)
    dev = max(abs(float((plus[i][j] - minus[i][j]) / (2 * h) - rhs[i][j]))
              for i in range(n1) for j in range(n1))

    Jsym = deformed_sharp_in_t(D, point)
    Sdot = [[x.restrict(point) for x in row] for row in flat_matrix(D.sigma.partial(D.tvar))]
    z = chart.zero()
    JS = [[_dot(Jsym[i], [Sdot[k][j] for k in range(n1)], z) for j in range(n1)] for i in range(n1)]
    exact = all(
        Jsym[i][j].partial(D.tvar) == -_dot(JS[i], [Jsym[k][j] for k in range(n1)], z)
        for i in range(n1) for j in range(n1))
    return MoserDerivativeReport(t0, h, dev, exact, tuple(tuple(r) for r in rhs))


def singular_times(D: DeformationFamily, point: Mapping[str, Fraction], lo=0, hi=1) -> list[str]:
    """Exact roots in ``[lo, hi]`` of ``det(I + sigma_t^flat J#)`` at a point, as text."""
    point = _point(point)
    chart = D.chart
    J = [[chart.const(x) for x in row] for row in
         sharp_matrix(D.base, {k: v for k, v in point.items() if k in D.base.chart.vars})]
    S = [[x.restrict(point) for x in row] for row in flat_matrix(D.sigma)]
    n1 = len(J)
    A = [[(chart.one() if i == j else chart.zero()) + _dot(S[i], [J[k][j] for k in range(n1)], chart.zero())
          for j in range(n1)] for i in range(n1)]
    t = sympy.Symbol(D.tvar)
    M = sympy.Matrix(n1, n1, lambda i, j: A[i][j].num.as_expr() / A[i][j].den.as_expr())
    det = sympy.factor(M.det())
    num, _ = sympy.fraction(sympy.together(det))
    if num == 0:
        return [f"every t in [{lo}, {hi}]"]
    poly = sympy.Poly(num, t)
    roots = []
    for r in sympy.real_roots(poly):
        if sympy.Rational(lo) <= r <= sympy.Rational(hi):
            text = str(r)
            if text not in roots:
                roots.append(text)
    return roots


@dataclass(frozen=True)
class FlowReport:
    steps: int
    drift: float
    table: tuple[tuple[float, float], ...]

    def csv(self) -> str:
        lines = ["t,drift"]
        lines += [f"{t:.6f},{d:.6e}" for t, d in self.table]
        return "\n".join(lines) + "\n"


def flow_invariance_probe(D: DeformationFamily, point: Mapping[str, Fraction], steps: int,
                          samples: int = 10, local_tol: float = 1e-6) -> FlowReport:
    """Integrate the Moser flow from ``point`` and measure how far ``Phi_t^* J_t`` drifts from ``J_0``.

    The derivation ``Delta_t = (X_t, f_t)`` is integrated as the vector field
    ``X_t + f_t u d_u`` on ``(x, u)`` starting at ``u = 1``, together with its
    variational equation (RK4, fixed step ``1/steps``). ``J_t`` is compared
    through its homogenization ``(1/u) L_t + d_u ^ E_t``.

    Each step is also redone as two half steps; a discrepancy above
    ``local_tol`` is reported as a pole ahead of the trajectory.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    chart = D.chart
    n = chart.dim
    point = _point(point)
    field = _moser_field(D)
    jac = [[f.partial(v) for v in chart.vars] for f in field]
    Jsym = [[x.to_chart(chart) for x in row] for row in sharp_matrix(D.base)]

    def velocity(t: float, y: list[float]) -> tuple[list[float], list[list[float]]]:
        jt_float(t, y)
        env = {v: y[i] for i, v in enumerate(chart.vars)}
        env[D.tvar] = t
        u = y[n]
        X = [f.eval_float(env) for f in field[:n]]
        f = field[n].eval_float(env)
        vel = X + [f * u]
        # Jacobian in (x, u)
        A = [[0.0] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            for j in range(n):
                A[i][j] = jac[i][j].eval_float(env)
        for j in range(n):
            A[n][j] = jac[n][j].eval_float(env) * u
        A[n][n] = f
        for v in vel + [x for row in A for x in row]:
            if not math.isfinite(v):
                raise SingularDeformationError(f"pole met by the flow at t = {t}", t, env)
        return vel, A

    def rhs(t, y, V):
        vel, A = velocity(t, y)
        dV = [[sum(A[i][k] * V[k][j] for k in range(n + 1)) for j in range(n + 1)] for i in range(n + 1)]
        return vel, dV

    def homog_pi(Jt: list[list[float]], u: float) -> list[list[float]]:
        P = [[0.0] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            for j in range(n):
                # L^{ij} is the d_j component of J#(dx^i)
                P[i][j] = Jt[j][i] / u
            P[n][i] = Jt[i][n]
            P[i][n] = -Jt[i][n]
        return P

    def jt_float(t: float, y: list[float]) -> list[list[float]]:
        env = {v: y[i] for i, v in enumerate(chart.vars)}
        env[D.tvar] = t
        J = [[x.eval_float(env) for x in row] for row in Jsym]
        S = [[x.eval_float(env) for x in row] for row in flat_matrix_cache]
        A = [[(1.0 if i == j else 0.0) + sum(S[i][k] * J[k][j] for k in range(n + 1)) for j in range(n + 1)]
             for i in range(n + 1)]
        det = _float_det(A)
        if det * det0[0] <= 0 or abs(det) < 1e-12:
            raise SingularDeformationError(f"I + sigma^flat J# degenerates along the flow near t = {t:.6g}",
                                           t, env)
        Ainv = _float_inverse(A)
        return [[sum(J[i][k] * Ainv[k][j] for k in range(n + 1)) for j in range(n + 1)] for i in range(n + 1)]

    flat_matrix_cache = flat_matrix(D.sigma)
    det0 = [1.0]  # sign of det(I + sigma^flat J#) at t = 0, which is 1
    y = [float(point.get(v, 0)) for v in chart.vars] + [1.0]
    V = [[1.0 if i == j else 0.0 for j in range(n + 1)] for i in range(n + 1)]
    P0 = homog_pi(jt_float(0.0, y), 1.0)
    dt = 1.0 / steps
    table = [(0.0, 0.0)]
    worst = 0.0
    every = max(1, steps // samples)
    for s in range(steps):
        t = s * dt
        y_new, V_new = _rk4(rhs, t, y, V, dt)
        # step doubling, used only to notice a pole ahead of the trajectory
        y_half, V_half = _rk4(rhs, t, y, V, dt / 2)
        y_half, _ = _rk4(rhs, t + dt / 2, y_half, V_half, dt / 2)
        err = max(abs(a - b) / (1.0 + abs(a)) for a, b in zip(y_new, y_half))
        if not math.isfinite(err) or err > local_tol:
            raise SingularDeformationError(
                f"flow approaches a pole near t = {t:.6g} or the step is too coarse "
                f"(local error estimate {err:.3e})", t, None)
        y, V = y_new, V_new
        t1 = (s + 1) * dt
        Pt = homog_pi(jt_float(t1, y), y[n])
        Vinv = _float_inverse(V)
        pulled = [[sum(Vinv[i][a] * Pt[a][b] * Vinv[j][b] for a in range(n + 1) for b in range(n + 1))
                   for j in range(n + 1)] for i in range(n + 1)]
        drift = max(abs(pulled[i][j] - P0[i][j]) for i in range(n + 1) for j in range(n + 1))
        worst = max(worst, drift)
        if (s + 1) % every == 0 or s + 1 == steps:
            table.append((t1, drift))
    return FlowReport(steps, worst, tuple(table))


def _moser_field(D: DeformationFamily) -> list[ScalarExpr]:
    """Components ``(X_t, f_t)`` of ``Delta_t`` as rational functions of ``(x, t)``."""
    chart = D.chart
    n1 = chart.dim + 1
    J = [[x.to_chart(chart) for x in row] for row in sharp_matrix(D.base)]
    S = flat_matrix(D.sigma)
    z, one = chart.zero(), chart.one()
    A = [[(one if i == j else z) + _dot(S[i], [J[k][j] for k in range(n1)], z) for j in range(n1)]
         for i in range(n1)]
    alpha = moser_alpha(D)
    a = [alpha.plain.coeffs.get((i,), z) for i in range(chart.dim)] + [alpha.jet.coeffs.get((), z)]
    # Delta = J A^-1 a
    try:
        w = solve(A, a)
    except SingularMatrixError:
        raise SingularDeformationError("I + sigma^flat J# is singular for all t") from None
    return [_dot(J[i], w, z) for i in range(n1)]


def _symbolic_sharp(D: DeformationFamily) -> list[list[ScalarExpr]]:
    chart = D.chart
    n1 = chart.dim + 1
    J = [[x.to_chart(chart) for x in row] for row in sharp_matrix(D.base)]
    S = flat_matrix(D.sigma)
    z, one = chart.zero(), chart.one()
    A = [[(one if i == j else z) + _dot(S[i], [J[k][j] for k in range(n1)], z) for j in range(n1)]
         for i in range(n1)]
    try:
        Ainv = inverse(A, z, one)
    except SingularMatrixError:
        raise SingularDeformationError("I + sigma^flat J# is singular for all t") from None
    return [[_dot(J[i], [Ainv[k][j] for k in range(n1)], z) for j in range(n1)] for i in range(n1)]


def transport_defect(D: DeformationFamily, uvar: str | None = None) -> Multivector:
    """``d/dt pi_t + [X~_t, pi_t]`` for the homogenized family, exactly.

    ``pi_t`` is the homogenization of ``J_t`` (in a fresh coordinate
    ``uvar``, picked automatically when omitted) and ``X~_t = X_t + f_t u d_u``
    the vector field of the Moser derivation ``(X_t, f_t)``. Zero means the
    flow of ``Delta_t`` pulls every ``J_t`` back to ``J_0``.
    """
    if uvar is None:
        uvar = next(f"u{k}" if k else "u" for k in range(len(D.chart.symbols) + 1)
                    if (f"u{k}" if k else "u") not in D.chart.symbols)
    JPt = pair_from_sharp_matrix(D.chart, _symbolic_sharp(D))
    HP = homogenize(JPt, uvar)
    h = HP.chart
    u = h.var(uvar)
    field = _moser_field(D)
    comps = {v: field[i].to_chart(h) for i, v in enumerate(D.chart.vars)}
    comps[uvar] = field[-1].to_chart(h) * u
    X = Multivector.vector(h, comps)
    return HP.bivector.partial(D.tvar) + schouten(X, HP.bivector)


def _rk4(rhs, t, y, V, dt):
    k1 = rhs(t, y, V)
    k2 = rhs(t + dt / 2, _axpy(y, k1[0], dt / 2), _maxpy(V, k1[1], dt / 2))
    k3 = rhs(t + dt / 2, _axpy(y, k2[0], dt / 2), _maxpy(V, k2[1], dt / 2))
    k4 = rhs(t + dt, _axpy(y, k3[0], dt), _maxpy(V, k3[1], dt))
    m = len(y)
    y1 = [y[i] + dt / 6 * (k1[0][i] + 2 * k2[0][i] + 2 * k3[0][i] + k4[0][i]) for i in range(m)]
    V1 = [[V[i][j] + dt / 6 * (k1[1][i][j] + 2 * k2[1][i][j] + 2 * k3[1][i][j] + k4[1][i][j])
           for j in range(m)] for i in range(m)]
    return y1, V1


def _axpy(y, v, c):
    return [a + c * b for a, b in zip(y, v)]


def _maxpy(Y, V, c):
    return [[a + c * b for a, b in zip(r, s)] for r, s in zip(Y, V)]


def _float_det(A: list[list[float]]) -> float:
    n = len(A)
    M = [row[:] for row in A]
    det = 1.0
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        if M[p][c] == 0.0:
            return 0.0
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return det


def _float_inverse(A: list[list[float]]) -> list[list[float]]:
    n = len(A)
    M = [row[:] + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        if abs(M[p][c]) < 1e-300:
            raise SingularDeformationError("matrix became singular along the flow")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0.0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]
