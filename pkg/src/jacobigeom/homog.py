"""Homogeneous Poisson structures and the chart-level Jacobi dictionary.

A Jacobi pair ``(L, E)`` on coordinates ``x`` corresponds to the bivector

    pi = (1/u) L + d_u ^ E,    Z = u d_u

on coordinates ``(u, x)``; ``pi`` is Poisson with ``Lie_Z pi = -pi`` exactly
when ``(L, E)`` is Jacobi. Dehomogenization assumes ``Z = u d_u`` already
holds in the given coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cartan import DiffForm, Multivector, contract, schouten, wedge
from .expr import Chart, ChartMismatchError, ExprError
from .jacobi import JacobiPair, jacobi_defect

__all__ = [
    "HomogeneousPoisson",
    "HomogeneityError",
    "EquivalenceReport",
    "homogenize",
    "dehomogenize",
    "homogeneity_defect",
    "equivalence_check",
]


class HomogeneityError(ExprError):
    pass


@dataclass(frozen=True)
class HomogeneousPoisson:
    bivector: Multivector
    homogeneity: Multivector

    def __post_init__(self):
        if self.bivector.degree != 2 or self.homogeneity.degree != 1:
            raise ExprError("a homogeneous Poisson structure is a bivector and a vector field")
        if self.bivector.chart != self.homogeneity.chart:
            raise ChartMismatchError("bivector and vector field live on different charts")

    @property
    def chart(self) -> Chart:
        return self.bivector.chart

    def is_homogeneous_poisson(self) -> bool:
        a, b = homogeneity_defect(self)
        return a.is_zero and b.is_zero


def homogenize(JP: JacobiPair, uvar: str) -> HomogeneousPoisson:
    """``(pi, Z) = ((1/u) L + d_u ^ E, u d_u)`` on the chart ``(u, *vars)``."""
    base = JP.chart
    if uvar in base.symbols:
        raise ExprError(f"variable collision: {uvar!r} already in chart {base.name!r}")
    chart = Chart(base.name, (uvar,) + base.vars, base.params)
    u = chart.var(uvar)
    du = Multivector.basis(chart, uvar)
    L = JP.bivector.to_chart(chart)
    E = JP.reeb.to_chart(chart)
    return HomogeneousPoisson(L * u.inverse() + wedge(du, E), du * u)


def dehomogenize(HP: HomogeneousPoisson, uvar: str) -> JacobiPair:
    """Recover ``(L, E)`` with ``E = i_du pi`` and ``L = u (pi - d_u ^ E)``."""
    chart = HP.chart
    if uvar not in chart.vars:
        raise ExprError(f"{uvar!r} is not a coordinate of chart {chart.name!r}")
    u = chart.var(uvar)
    du = Multivector.basis(chart, uvar)
    if HP.homogeneity != du * u:
        raise HomogeneityError(f"homogeneity field must be {uvar}*d_{uvar} in these coordinates; "
                               f"got {HP.homogeneity}")
    E = contract(DiffForm.basis(chart, uvar), HP.bivector)
    L = (HP.bivector - wedge(du, E)) * u
    for name, T in (("E", E), ("Lambda", L)):
        if T.depends_on(uvar):
            raise HomogeneityError(f"extracted {name} depends on {uvar}: {T}")
    if E.uses_index(uvar) or L.uses_index(uvar):
        raise HomogeneityError("extracted tensors have a d_u component")
    if chart.dim == 1:
        raise HomogeneityError("nothing left after removing the homogeneity coordinate")
    base = Chart(chart.name, tuple(v for v in chart.vars if v != uvar), chart.params)
    return JacobiPair(L.to_chart(base), E.to_chart(base))


def homogeneity_defect(HP: HomogeneousPoisson) -> tuple[Multivector, Multivector]:
    """``([pi, pi], Lie_Z pi + pi)``."""
    P, Z = HP.bivector, HP.homogeneity
    return schouten(P, P), schouten(Z, P) + P


@dataclass(frozen=True)
class EquivalenceReport:
    jacobi: tuple[Multivector, Multivector]
    homogeneous: tuple[Multivector, Multivector]
    poisson: HomogeneousPoisson

    @property
    def jacobi_ok(self) -> bool:
        return all(t.is_zero for t in self.jacobi)

    @property
    def homogeneous_ok(self) -> bool:
        return all(t.is_zero for t in self.homogeneous)

    @property
    def consistent(self) -> bool:
        return self.jacobi_ok == self.homogeneous_ok


def equivalence_check(JP: JacobiPair, uvar: str) -> EquivalenceReport:
    HP = homogenize(JP, uvar)
    return EquivalenceReport(jacobi_defect(JP), homogeneity_defect(HP), HP)
