"""The omni-Lie algebroid ``DL + J^1 L`` of a trivial line bundle.

Sections are pairs ``(Delta, psi)`` of a :class:`~jacobigeom.cartan.Derivation`
and a :class:`~jacobigeom.jacobi.JetSection`. Brackets and B-field shears act
on symbolic sections; subspaces live in a single fiber at a rational point,
written in the basis ``(d_1, ..., d_n, 1, dx^1, ..., dx^n, 1*)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .cartan import DiffForm, Derivation, LForm, Multivector, dL, iota, lieD
from .expr import Chart, ChartMismatchError, ExprError, ScalarExpr
from .jacobi import JacobiPair, JetSection, jacobi_defect, sharp, sharp_matrix
from .linalg import nullspace, rank, rref

__all__ = [
    "OmniSection",
    "TwistForm",
    "OmniFiberSubspace",
    "TransversalSpec",
    "TransversalityError",
    "TransversalClass",
    "HomPoissonType",
    "InvolutivityReport",
    "pairing",
    "dorfman",
    "bfield",
    "graph_section",
    "graph_subspace",
    "dl_fiber",
    "jet_fiber",
    "involutivity_check",
    "backwards_transform",
    "classify_transversal",
    "homogeneous_poisson_type_check",
]


@dataclass(frozen=True)
class OmniSection:
    der: Derivation
    jet: JetSection

    def __post_init__(self):
        if self.der.chart != self.jet.chart:
            raise ChartMismatchError("derivation and jet parts live on different charts")

    @property
    def chart(self) -> Chart:
        return self.der.chart

    @classmethod
    def zero(cls, chart: Chart) -> "OmniSection":
        return cls(Derivation.zero(chart), JetSection.zero(chart))

    def __add__(self, other: "OmniSection") -> "OmniSection":
        return OmniSection(self.der + other.der, self.jet + other.jet)

    def __sub__(self, other: "OmniSection") -> "OmniSection":
        return OmniSection(self.der - other.der, self.jet - other.jet)

    def __mul__(self, c) -> "OmniSection":
        return OmniSection(self.der * c, self.jet * c)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return self.der.is_zero and self.jet.is_zero

    def __str__(self):
        return f"[{self.der} | {self.jet}]"


class TwistForm:
    """A dL-closed LForm of degree 3."""

    __slots__ = ("H",)

    def __init__(self, H: LForm):
        if H.degree != 3:
            raise ExprError("a twist is a degree-3 LForm")
        if not dL(H).is_zero:
            raise ExprError(f"twist is not closed: dL H = {dL(H)}")
        self.H = H


def pairing(a: OmniSection, b: OmniSection) -> ScalarExpr:
    """``psi_a(Delta_b) + psi_b(Delta_a)``."""
    if a.chart != b.chart:
        raise ChartMismatchError("sections live on different charts")
    return a.jet(b.der) + b.jet(a.der)


def dorfman(a: OmniSection, b: OmniSection, H: TwistForm | None = None) -> OmniSection:
    """``([D1, D2], Lie_D1 psi2 - i_D2 dL psi1 + i_D1 i_D2 H)``."""
    if a.chart != b.chart:
        raise ChartMismatchError("sections live on different charts")
    psi1, psi2 = a.jet.to_lform(), b.jet.to_lform()
    jet = lieD(a.der, psi2) - iota(b.der, dL(psi1))
    if H is not None:
        if H.H.chart != a.chart:
            raise ChartMismatchError("twist lives on a different chart")
        jet = jet + iota(a.der, iota(b.der, H.H))
    return OmniSection(a.der.bracket(b.der), JetSection.from_lform(jet))


def bfield(B: LForm, a: OmniSection) -> OmniSection:
    """The shear ``(Delta, psi) -> (Delta, psi + i_Delta B)``."""
    if B.degree != 2:
        raise ExprError("a B-field is a degree-2 LForm")
    if B.chart != a.chart:
        raise ChartMismatchError("B-field lives on a different chart")
    return OmniSection(a.der, a.jet + JetSection.from_lform(iota(a.der, B)))


def graph_section(JP: JacobiPair, psi: JetSection) -> OmniSection:
    return OmniSection(sharp(JP, psi), psi)


# -- fiber linear algebra ----------------------------------------------------------

def _reduce(vectors: Sequence[Sequence[Fraction]], width: int) -> tuple[tuple[Fraction, ...], ...]:
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return ()
    R, piv = rref(rows)
    return tuple(tuple(R[i]) for i in range(len(piv)))


@dataclass(frozen=True)
class OmniFiberSubspace:
    """A subspace of one fiber, stored by its reduced row echelon basis.

    ``vars`` names the coordinates, ``point`` the base point. Vectors have
    ``2(n+1)`` entries: derivation part first, jet part second.
    """

    vars: tuple[str, ...]
    point: tuple[tuple[str, Fraction], ...]
    basis: tuple[tuple[Fraction, ...], ...] = field(default=())

    @classmethod
    def span(cls, vars: Sequence[str], point: Mapping[str, Fraction],
             vectors: Sequence[Sequence[Fraction]]) -> "OmniFiberSubspace":
        vars = tuple(vars)
        width = 2 * (len(vars) + 1)
        for v in vectors:
            if len(v) != width:
                raise ExprError(f"fiber vectors need {width} entries, got {len(v)}")
        pt = tuple((v, Fraction(point[v])) for v in vars if v in point)
        return cls(vars, pt, _reduce(vectors, width))

    @property
    def n(self) -> int:
        return len(self.vars)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def point_map(self) -> dict[str, Fraction]:
        return dict(self.point)

    def der_part(self, v: Sequence[Fraction]) -> list[Fraction]:
        return list(v[: self.n + 1])

    def jet_part(self, v: Sequence[Fraction]) -> list[Fraction]:
        return list(v[self.n + 1:])

    def gram(self) -> list[list[Fraction]]:
        """Pairing matrix restricted to the basis."""
        n1 = self.n + 1
        return [[sum(a[i] * b[n1 + i] + b[i] * a[n1 + i] for i in range(n1)) for b in self.basis]
                for a in self.basis]

    def is_isotropic(self) -> bool:
        return all(x == 0 for row in self.gram() for x in row)

    def is_lagrangian(self) -> bool:
        return self.dim == self.n + 1 and self.is_isotropic()

    def dl_intersection(self) -> list[list[Fraction]]:
        """Basis of the intersection with the derivation fiber (derivation parts only)."""
        if not self.basis:
            return []
        n1 = self.n + 1
        jets = [[v[n1 + i] for v in self.basis] for i in range(n1)]
        out = []
        for c in nullspace(jets):
            out.append([sum(c[k] * self.basis[k][i] for k in range(self.dim)) for i in range(n1)])
        return out

    def dl_intersection_rank(self) -> int:
        return self.dim - rank([self.jet_part(v) for v in self.basis]) if self.basis else 0

    def __eq__(self, other):
        if not isinstance(other, OmniFiberSubspace):
            return NotImplemented
        return self.vars == other.vars and self.point == other.point and self.basis == other.basis

    def __hash__(self):
        return hash((self.vars, self.point, self.basis))


def _unit(width: int, i: int) -> list[Fraction]:
    v = [Fraction(0)] * width
    v[i] = Fraction(1)
    return v


def dl_fiber(vars: Sequence[str], point: Mapping[str, Fraction]) -> OmniFiberSubspace:
    n1 = len(vars) + 1
    return OmniFiberSubspace.span(vars, point, [_unit(2 * n1, i) for i in range(n1)])


def jet_fiber(vars: Sequence[str], point: Mapping[str, Fraction]) -> OmniFiberSubspace:
    n1 = len(vars) + 1
    return OmniFiberSubspace.span(vars, point, [_unit(2 * n1, n1 + i) for i in range(n1)])


def graph_subspace(JP: JacobiPair, point: Mapping[str, Fraction]) -> OmniFiberSubspace:
    """Fiber of the graph ``{(J# psi, psi)}`` at a point."""
    point = {k: Fraction(v) for k, v in point.items()}
    M = sharp_matrix(JP, point)
    n1 = JP.chart.dim + 1
    vectors = [[M[i][j] for i in range(n1)] + _unit(n1, j) for j in range(n1)]
    return OmniFiberSubspace.span(JP.chart.vars, point, vectors)


# -- involutivity --------------------------------------------------------------------

@dataclass(frozen=True)
class InvolutivityReport:
    involutive: bool
    defect_zero: bool
    checked: int
    failures: tuple[tuple[str, str, str], ...]

    @property
    def agrees(self) -> bool:
        return self.involutive == self.defect_zero


def involutivity_check(JP: JacobiPair, max_failures: int = 5) -> InvolutivityReport:
    """Bracket a spanning family of graph sections and test membership in the graph.

    The family is ``x^a (J# e_i, e_i)`` for jet basis vectors ``e_i`` and
    coefficients ``1`` or a single coordinate; ``c`` lies in the graph when
    ``J#(psi_c) - Delta_c`` vanishes.
    """
    chart = JP.chart
    z = chart.zero()
    jets = [JetSection(DiffForm.basis(chart, v), z) for v in chart.vars] + [JetSection.one_star(chart)]
    coeffs = [chart.one()] + [chart.var(v) for v in chart.vars]
    plain = [graph_section(JP, e) for e in jets]
    first = [(f"{c}*g{i}", graph_section(JP, e * c)) for c in coeffs for i, e in enumerate(jets)]
    failures = []
    checked = 0
    for (name_a, a), (j, b) in product(first, enumerate(plain)):
        c = dorfman(a, b)
        checked += 1
        residue = sharp(JP, c.jet) - c.der
        if not residue.is_zero:
            failures.append((name_a, f"g{j}", str(residue)))
            if len(failures) >= max_failures:
                break
    d1, d2 = jacobi_defect(JP)
    return InvolutivityReport(not failures, d1.is_zero and d2.is_zero, checked, tuple(failures))


# -- transversals -----------------------------------------------------------------------

class TransversalityError(ExprError):
    def __init__(self, message: str, rank: int, needed: int):
        super().__init__(message)
        self.rank = rank
        self.needed = needed


@dataclass(frozen=True)
class TransversalSpec:
    """A submanifold ``N = {normal_vars = 0}`` of a chart.

    ``connection_offsets`` optionally carries flat connection 1-forms (keyed
    by normal variable) for homogeneous cocontact transversals.
    """

    chart: Chart
    normal_vars: tuple[str, ...]
    connection_offsets: Mapping[str, DiffForm] | None = None

    def __post_init__(self):
        object.__setattr__(self, "normal_vars", tuple(self.normal_vars))
        if not self.normal_vars:
            raise ExprError("a transversal needs at least one normal variable")
        for v in self.normal_vars:
            self.chart.index(v)
        if len(set(self.normal_vars)) == self.chart.dim:
            raise ExprError("normal variables must be a proper subset of the chart")
        for v, w in (self.connection_offsets or {}).items():
            if v not in self.normal_vars:
                raise ExprError(f"connection offset keyed by non-normal variable {v!r}")
            if w.chart != self.chart or w.degree != 1:
                raise ExprError("connection offsets are 1-forms on the ambient chart")

    @property
    def tangent_vars(self) -> tuple[str, ...]:
        return tuple(v for v in self.chart.vars if v not in self.normal_vars)

    def check_point(self, point: Mapping[str, Fraction]) -> None:
        for v in self.normal_vars:
            if Fraction(point.get(v, 0)) != 0:
                raise ExprError(f"point is not on N: {v} = {point[v]}")


def backwards_transform(sub: OmniFiberSubspace, spec: TransversalSpec) -> OmniFiberSubspace:
    """Pull a fiber subspace back along the inclusion of ``N``.

    Keeps the elements whose derivation part is tangent to ``N`` and restricts
    their jet parts to ``N``.
    """
    if sub.vars != spec.chart.vars:
        raise ChartMismatchError("subspace and transversal use different charts")
    spec.check_point(sub.point_map)
    n = sub.n
    normal = [spec.chart.index(v) for v in spec.normal_vars]
    tangent = [spec.chart.index(v) for v in spec.tangent_vars]
    keep_der = tangent + [n]
    keep_jet = [n + 1 + i for i in tangent] + [2 * n + 1]
    out = []
    if sub.basis:
        constraints = [[v[i] for v in sub.basis] for i in normal]
        for c in nullspace(constraints):
            w = [sum(c[k] * sub.basis[k][i] for k in range(sub.dim)) for i in range(2 * n + 2)]
            out.append([w[i] for i in keep_der + keep_jet])
    pt = {v: x for v, x in sub.point if v in spec.tangent_vars}
    return OmniFiberSubspace.span(spec.tangent_vars, pt, out)


@dataclass(frozen=True)
class TransversalClass:
    kind: str
    intersection_rank: int
    transversal_rank: int
    pulled_back: OmniFiberSubspace


def classify_transversal(JP: JacobiPair, spec: TransversalSpec,
                         point: Mapping[str, Fraction]) -> TransversalClass:
    """Cosymplectic (rank 0), cocontact (rank 1) or neither.

    Raises :class:`TransversalityError` when the graph does not span the
    normal directions.
    """
    if JP.chart != spec.chart:
        raise ChartMismatchError("pair and transversal use different charts")
    point = {k: Fraction(v) for k, v in point.items()}
    spec.check_point(point)
    M = sharp_matrix(JP, point)
    normal = [JP.chart.index(v) for v in spec.normal_vars]
    r = rank([M[i] for i in normal])
    n1 = JP.chart.dim + 1
    total = n1 - len(normal) + r
    if r < len(normal):
        raise TransversalityError(
            f"not transversal: derivations and graph span rank {total} of {n1}", total, n1)
    B = backwards_transform(graph_subspace(JP, point), spec)
    k = B.dl_intersection_rank()
    kind = {0: "cosymplectic", 1: "cocontact"}.get(k, "neither")
    return TransversalClass(kind, k, total, B)


@dataclass(frozen=True)
class HomPoissonType:
    is_type: bool
    rank: int
    generator: tuple[Fraction, ...] | None
    euler: tuple[Fraction, ...] | None

    def describe(self, vars: Sequence[str]) -> str:
        if self.generator is None:
            return "none"
        if self.euler is None:
            return " + ".join(f"{c}*d_{v}" for c, v in zip(self.generator, vars) if c)
        return "1" + "".join(f" {'-' if c > 0 else '+'} {abs(c)}*d_{v}" for c, v in zip(self.euler, vars) if c)


def homogeneous_poisson_type_check(sub: OmniFiberSubspace) -> HomPoissonType:
    """Whether the intersection with the derivation fiber is a line.

    The generator is scaled to unit ``1``-coefficient when possible and then
    read as ``1 - Z``; ``euler`` holds the components of ``Z``.
    """
    if not sub.is_isotropic():
        raise ExprError("subspace is not isotropic")
    inter = sub.dl_intersection()
    k = len(inter)
    if k != 1:
        return HomPoissonType(False, k, None, None)
    g = inter[0]
    n = sub.n
    if g[n] != 0:
        g = [x / g[n] for x in g]
        return HomPoissonType(True, 1, tuple(g), tuple(-x for x in g[:n]))
    return HomPoissonType(True, 1, tuple(g), None)
