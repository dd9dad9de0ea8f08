"""Jacobi pairs ``(Lambda, E)`` on a chart with trivialized line bundle.

The Jacobi tensor ``J = Lambda + 1 ^ E`` acts on first jets by::

    J#(alpha + r 1*) = Lambda#(alpha) + r E - alpha(E) 1

with ``Lambda#(alpha)`` the insertion of ``alpha`` in the first slot of
``Lambda``. The induced bracket on sections is

    {lam, mu} = Lambda(d lam, d mu) + lam E(mu) - mu E(lam).

Structure equations. Writing ``[.,.]`` for the Schouten bracket of
:mod:`jacobigeom.cartan`, the bracket above satisfies the Jacobi identity
exactly when ``[E, Lambda] = 0`` and ``(1/2)[Lambda, Lambda] + E ^ Lambda = 0``.
:func:`self_bracket` returns ``(1/2)[Lambda, Lambda]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .cartan import (Derivation, DiffForm, LForm, Multivector, apply_vector, contract, differential,
                     schouten, wedge)
from .expr import Chart, ChartMismatchError, ExprError, ScalarExpr

__all__ = [
    "JacobiPair",
    "JetSection",
    "self_bracket",
    "jacobi_defect",
    "sharp",
    "sharp_matrix",
    "jacobi_bracket",
    "hamiltonian_derivation",
    "jet_of",
    "pair_from_sharp_matrix",
]


@dataclass(frozen=True)
class JacobiPair:
    bivector: Multivector
    reeb: Multivector

    def __post_init__(self):
        if self.bivector.degree != 2 or self.reeb.degree != 1:
            raise ExprError("a Jacobi pair is a bivector and a vector field")
        if self.bivector.chart != self.reeb.chart:
            raise ChartMismatchError("bivector and vector field live on different charts")

    @property
    def chart(self) -> Chart:
        return self.bivector.chart

    @classmethod
    def zero(cls, chart: Chart) -> "JacobiPair":
        return cls(Multivector.zero(chart, 2), Multivector.zero(chart, 1))

    def to_chart(self, chart: Chart) -> "JacobiPair":
        return JacobiPair(self.bivector.to_chart(chart), self.reeb.to_chart(chart))

    def is_jacobi(self) -> bool:
        a, b = jacobi_defect(self)
        return a.is_zero and b.is_zero


@dataclass(frozen=True)
class JetSection:
    """A section ``alpha + r 1*`` of the first jet bundle."""

    form: DiffForm
    scalar: ScalarExpr

    def __post_init__(self):
        if self.form.degree != 1:
            raise ExprError("the form part of a jet section is a 1-form")
        if self.scalar.chart != self.form.chart:
            raise ChartMismatchError("jet section parts live on different charts")

    @property
    def chart(self) -> Chart:
        return self.form.chart

    @classmethod
    def zero(cls, chart: Chart) -> "JetSection":
        return cls(DiffForm.zero(chart, 1), chart.zero())

    @classmethod
    def one_star(cls, chart: Chart) -> "JetSection":
        return cls(DiffForm.zero(chart, 1), chart.one())

    @classmethod
    def from_lform(cls, w: LForm) -> "JetSection":
        if w.degree != 1:
            raise ExprError("only degree-1 LForms are jet sections")
        return cls(w.plain, w.jet.scalar())

    def to_lform(self) -> LForm:
        return LForm(self.form, DiffForm.function(self.scalar))

    def __add__(self, other: "JetSection") -> "JetSection":
        return JetSection(self.form + other.form, self.scalar + other.scalar)

    def __sub__(self, other: "JetSection") -> "JetSection":
        return JetSection(self.form - other.form, self.scalar - other.scalar)

    def __neg__(self) -> "JetSection":
        return JetSection(-self.form, -self.scalar)

    def __mul__(self, c) -> "JetSection":
        return JetSection(self.form * c, self.scalar * c)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return self.form.is_zero and self.scalar.is_zero

    def components(self) -> list[ScalarExpr]:
        """Fiber components in the basis ``(dx^1, ..., dx^n, 1*)``."""
        z = self.chart.zero()
        return [self.form.coeffs.get((i,), z) for i in range(self.chart.dim)] + [self.scalar]

    def __call__(self, D: Derivation) -> ScalarExpr:
        """Duality pairing ``psi(Delta) = alpha(X) + r f``."""
        out = self.scalar * D.scalar
        for (i,), a in self.form.coeffs.items():
            x = D.symbol.coeffs.get((i,))
            if x is not None:
                out = out + a * x
        return out

    def __str__(self):
        return f"({self.form}; {self.scalar})"


def jet_of(lam: ScalarExpr) -> JetSection:
    """First jet ``j^1 lam = d lam + lam 1*``."""
    return JetSection(differential(lam), lam)


def self_bracket(L: Multivector) -> Multivector:
    """``(1/2)[L, L]`` for a bivector ``L``."""
    return schouten(L, L) * Fraction(1, 2)


def jacobi_defect(JP: JacobiPair) -> tuple[Multivector, Multivector]:
    """The two structure tensors ``(self_bracket(L) + E ^ L, [E, L])``.

    The pair is Jacobi iff both vanish identically.
    """
    L, E = JP.bivector, JP.reeb
    return self_bracket(L) + wedge(E, L), schouten(E, L)


def sharp(JP: JacobiPair, psi: JetSection) -> Derivation:
    if psi.chart != JP.chart:
        raise ChartMismatchError("jet section and Jacobi pair live on different charts")
    X = contract(psi.form, JP.bivector) + JP.reeb * psi.scalar
    return Derivation(X, -psi(Derivation(JP.reeb)))


def sharp_matrix(JP: JacobiPair, point: Mapping[str, Fraction] | None = None) -> list[list]:
    """Matrix of ``J#`` from the jet basis ``(dx^i, 1*)`` to the derivation basis ``(d_i, 1)``.

    Entries are rational numbers when ``point`` is given, otherwise scalar
    expressions. Column ``j`` is the image of the ``j``-th jet basis vector.
    """
    chart = JP.chart
    n = chart.dim
    z = chart.zero()
    cols = []
    for j in range(n + 1):
        if j < n:
            e = JetSection(DiffForm.basis(chart, chart.vars[j]), z)
        else:
            e = JetSection.one_star(chart)
        cols.append(sharp(JP, e).components())
    M = [[cols[j][i] for j in range(n + 1)] for i in range(n + 1)]
    if point is None:
        return M
    return [[x.eval(point) for x in row] for row in M]


def jacobi_bracket(JP: JacobiPair, lam: ScalarExpr, mu: ScalarExpr) -> ScalarExpr:
    L, E = JP.bivector, JP.reeb
    dl, dm = differential(lam), differential(mu)
    out = lam * apply_vector(E, mu) - mu * apply_vector(E, lam)
    for (i, j), c in L.coeffs.items():
        a = dl.coeffs.get((i,))
        b = dm.coeffs.get((j,))
        if a is not None and b is not None:
            out = out + c * a * b
        a = dl.coeffs.get((j,))
        b = dm.coeffs.get((i,))
        if a is not None and b is not None:
            out = out - c * a * b
    return out


def hamiltonian_derivation(JP: JacobiPair, lam: ScalarExpr) -> Derivation:
    """The derivation ``mu -> {lam, mu}``."""
    return sharp(JP, jet_of(lam))


def pair_from_sharp_matrix(chart: Chart, M: list[list[ScalarExpr]]) -> JacobiPair:
    """Read ``(Lambda, E)`` back from a symbolic matrix of ``J#``.

    Raises when the matrix is not of the form produced by :func:`sharp_matrix`.
    """
    n = chart.dim
    if len(M) != n + 1 or any(len(row) != n + 1 for row in M):
        raise ExprError(f"expected a {n + 1}x{n + 1} matrix")
    terms = []
    for i in range(n):
        if not M[i][i].is_zero:
            raise ExprError("diagonal of the bivector block must vanish")
        for j in range(i + 1, n):
            if M[j][i] != -M[i][j]:
                raise ExprError("bivector block is not antisymmetric")
            terms.append(((i, j), M[j][i]))
    E = Multivector(chart, 1, {(j,): M[j][n] for j in range(n)})
    if not M[n][n].is_zero or any(M[n][i] != -M[i][n] for i in range(n)):
        raise ExprError("the 1-row of the matrix must be minus the Reeb column")
    return JacobiPair(Multivector.from_terms(chart, 2, terms), E)
