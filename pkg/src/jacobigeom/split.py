"""Canonical local models around transversals and the checks that go with them.

Fiber coordinates are ``q, p`` (or ``q1, p1, q2, p2, ...`` when ``k > 1``),
with an extra ``u`` in front for the contact model. Base structures are
given on a chart of their own, or on any chart whose fiber coordinates they
ignore; they are moved to the product chart ``fiber + base``.

Models:

* cosymplectic: ``(pi_can + L_N + E_N ^ Z_can, E_N)``
* contact: ``(L_can + pi_N + E_can ^ Z_N, E_can)``
* homogeneous Poisson: ``(pi_can + pi_N, Z_can [+ d_pk] + Z_N)``

with ``pi_can = sum d_pi ^ d_qi``, ``Z_can = sum p_i d_pi``,
``L_can = sum (p_i d_u + d_qi) ^ d_pi`` and ``E_can = d_u``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cartan import DiffForm, LForm, Multivector, contract, dL, wedge
from .expr import Chart, ExprError, ScalarExpr
from .homog import HomogeneousPoisson, homogeneity_defect
from .jacobi import JacobiPair, jacobi_defect, sharp_matrix
from .linalg import SingularMatrixError, inverse, rank
from .omni import TransversalSpec, classify_transversal

__all__ = [
    "KINDS",
    "LeakageError",
    "SplitModel",
    "ContactSearch",
    "SplitReport",
    "ThetaForm",
    "EulerCheck",
    "fiber_vars",
    "canonical_cosymplectic_pair",
    "canonical_euler",
    "contact_candidates",
    "search_contact_readings",
    "canonical_contact_pair",
    "assemble_cosymplectic",
    "assemble_contact",
    "assemble_homogeneous_poisson",
    "split_check",
    "theta",
    "euler_like_check",
    "omega_form",
    "in_sharp_image",
]

KINDS = ("cosymplectic", "contact", "homogeneous_poisson_case_i", "homogeneous_poisson_case_ii")


class LeakageError(ExprError):
    """Base data depends on, or points along, fiber coordinates."""


def fiber_vars(k: int, contact: bool = False) -> tuple[str, ...]:
    if k < 1:
        raise ExprError("k must be at least 1")
    if k == 1:
        qp = ("q", "p")
    else:
        qp = tuple(x for i in range(1, k + 1) for x in (f"q{i}", f"p{i}"))
    return ("u",) + qp if contact else qp


@dataclass(frozen=True)
class SplitModel:
    kind: str
    k: int
    base_vars: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExprError(f"unknown model kind {self.kind!r}")
        clash = set(self.fiber_vars) & set(self.base_vars)
        if clash:
            raise LeakageError(f"base variables {sorted(clash)} clash with fiber variables")

    @property
    def fiber_vars(self) -> tuple[str, ...]:
        return fiber_vars(self.k, self.kind == "contact")

    @property
    def fiber_dim(self) -> int:
        return len(self.fiber_vars)

    def check_fiber_dim(self, declared: int) -> None:
        even = self.kind != "contact"
        if declared % 2 != (0 if even else 1):
            raise ExprError(f"fiber dimension {declared} has the wrong parity for a {self.kind} model")
        if declared != self.fiber_dim:
            raise ExprError(f"fiber dimension {declared} does not match k={self.k}")

    def chart(self) -> Chart:
        return Chart(f"{self.kind}{self.k}", self.fiber_vars + self.base_vars)


def _pairs(k: int) -> list[tuple[str, str]]:
    fv = fiber_vars(k)
    return [(fv[2 * i], fv[2 * i + 1]) for i in range(k)]


def _fiber_chart(k: int, contact: bool) -> Chart:
    return Chart(("contact" if contact else "cosymplectic") + str(k), fiber_vars(k, contact))


def _pi_can(chart: Chart, k: int) -> Multivector:
    return Multivector.from_terms(chart, 2, [((p, q), 1) for q, p in _pairs(k)])


def _z_can(chart: Chart, k: int) -> Multivector:
    return Multivector.vector(chart, {p: chart.var(p) for _, p in _pairs(k)})


def canonical_cosymplectic_pair(k: int) -> JacobiPair:
    """``(sum d_pi ^ d_qi, 0)`` on ``R^2k``."""
    chart = _fiber_chart(k, False)
    return JacobiPair(_pi_can(chart, k), Multivector.zero(chart, 1))


def canonical_euler(k: int) -> Multivector:
    """``Z_can = sum p_i d_pi`` on the same chart as the cosymplectic pair."""
    return _z_can(_fiber_chart(k, False), k)


def contact_candidates(k: int) -> list[tuple[str, JacobiPair]]:
    """Readings ``sum (s p_i d_u + d_qi) ^ d_ti`` with ``s = +-1`` and ``t`` in ``{q, p}``."""
    chart = _fiber_chart(k, True)
    E = Multivector.basis(chart, "u")
    out = []
    for sign in (1, -1):
        for target in ("p", "q"):
            L = Multivector.zero(chart, 2)
            for q, p in _pairs(k):
                X = Multivector.vector(chart, {"u": chart.var(p) * sign, q: 1})
                L = L + wedge(X, Multivector.basis(chart, p if target == "p" else q))
            label = f"({'+' if sign > 0 else '-'}p d_u + d_q) ^ d_{target}"
            out.append((label, JacobiPair(L, E)))
    return out


def _is_contact(JP: JacobiPair, k: int) -> bool:
    # E ^ L^k must be a volume form somewhere
    top = JP.reeb
    for _ in range(k):
        top = wedge(top, JP.bivector)
    return not top.is_zero


@dataclass(frozen=True)
class ContactSearch:
    k: int
    results: tuple[tuple[str, bool, bool], ...]

    @property
    def jacobi_readings(self) -> list[str]:
        return [lab for lab, jac, _ in self.results if jac]

    @property
    def contact_readings(self) -> list[str]:
        return [lab for lab, jac, con in self.results if jac and con]


def search_contact_readings(k: int) -> ContactSearch:
    rows = []
    for label, JP in contact_candidates(k):
        rows.append((label, JP.is_jacobi(), _is_contact(JP, k)))
    return ContactSearch(k, tuple(rows))


def canonical_contact_pair(k: int) -> JacobiPair:
    """The unique candidate reading that is a contact Jacobi pair.

    Aborts when the search does not single out exactly one reading.
    """
    search = search_contact_readings(k)
    winners = search.contact_readings
    if len(winners) != 1:
        table = "; ".join(f"{lab}: jacobi={j} contact={c}" for lab, j, c in search.results)
        raise RuntimeError(f"contact search found {len(winners)} valid readings at k={k}: {table}")
    return dict(contact_candidates(k))[winners[0]]


# -- assembly ----------------------------------------------------------------------

def _lift(T: Multivector | None, degree: int, fiber: Sequence[str], chart: Chart) -> Multivector:
    if T is None:
        return Multivector.zero(chart, degree)
    if T.degree != degree:
        raise ExprError(f"expected a degree-{degree} multivector, got degree {T.degree}")
    for v in fiber:
        if v in T.chart.symbols and (T.depends_on(v) or (v in T.chart.vars and T.uses_index(v))):
            raise LeakageError(f"base tensor involves fiber coordinate {v!r}: {T}")
    for v in T.chart.params:
        if T.depends_on(v):
            raise LeakageError(f"base tensor depends on parameter {v!r}")
    return T.to_chart(chart)


def _base_vars(*tensors: Multivector | None, fiber: Sequence[str]) -> tuple[str, ...]:
    for T in tensors:
        if T is not None:
            return tuple(v for v in T.chart.vars if v not in fiber)
    return ()


def _product_chart(kind: str, k: int, base_vars: Sequence[str]) -> Chart:
    return SplitModel(kind, k, tuple(base_vars)).chart()


def assemble_cosymplectic(LN: Multivector | None, EN: Multivector | None, k: int) -> JacobiPair:
    fv = fiber_vars(k)
    chart = _product_chart("cosymplectic", k, _base_vars(LN, EN, fiber=fv))
    L, E = _lift(LN, 2, fv, chart), _lift(EN, 1, fv, chart)
    return JacobiPair(_pi_can(chart, k) + L + wedge(E, _z_can(chart, k)), E)


def assemble_contact(piN: Multivector | None, ZN: Multivector | None, k: int) -> JacobiPair:
    fv = fiber_vars(k, contact=True)
    chart = _product_chart("contact", k, _base_vars(piN, ZN, fiber=fv))
    P, Z = _lift(piN, 2, fv, chart), _lift(ZN, 1, fv, chart)
    E = Multivector.basis(chart, "u")
    L = Multivector.zero(chart, 2)
    for q, p in _pairs(k):
        L = L + wedge(Multivector.vector(chart, {"u": chart.var(p), q: 1}), Multivector.basis(chart, p))
    return JacobiPair(L + P + wedge(E, Z), E)


def assemble_homogeneous_poisson(piN: Multivector | None, ZN: Multivector | None, k: int,
                                 case: str) -> HomogeneousPoisson:
    if case not in ("i", "ii"):
        raise ExprError(f"case must be 'i' or 'ii', got {case!r}")
    kind = f"homogeneous_poisson_case_{case}"
    fv = fiber_vars(k)
    chart = _product_chart(kind, k, _base_vars(piN, ZN, fiber=fv))
    P, Z = _lift(piN, 2, fv, chart), _lift(ZN, 1, fv, chart)
    Zc = _z_can(chart, k) + Z
    if case == "i":
        Zc = Zc + Multivector.basis(chart, _pairs(k)[-1][1])
    return HomogeneousPoisson(_pi_can(chart, k) + P, Zc)


@dataclass(frozen=True)
class SplitReport:
    kind: str
    model: JacobiPair | HomogeneousPoisson
    input_defect: tuple[Multivector, Multivector]
    output_defect: tuple[Multivector, Multivector]

    @property
    def input_ok(self) -> bool:
        return all(t.is_zero for t in self.input_defect)

    @property
    def output_ok(self) -> bool:
        return all(t.is_zero for t in self.output_defect)

    @property
    def consistent(self) -> bool:
        return self.input_ok == self.output_ok


def split_check(kind: str, bivector: Multivector | None, vector: Multivector | None, k: int) -> SplitReport:
    """Assemble a model and compare its defect with the defect of the base data."""
    chart = bivector.chart if bivector is not None else vector.chart if vector is not None else None
    if chart is not None:
        bivector = bivector if bivector is not None else Multivector.zero(chart, 2)
        vector = vector if vector is not None else Multivector.zero(chart, 1)
    if kind == "cosymplectic":
        model = assemble_cosymplectic(bivector, vector, k)
        out = jacobi_defect(model)
    elif kind == "contact":
        model = assemble_contact(bivector, vector, k)
        out = jacobi_defect(model)
    elif kind in ("homogeneous_poisson_case_i", "homogeneous_poisson_case_ii"):
        model = assemble_homogeneous_poisson(bivector, vector, k, kind.rsplit("_", 1)[1])
        out = homogeneity_defect(model)
    else:
        raise ExprError(f"unknown model kind {kind!r}")
    if chart is None:
        base = (Multivector.zero(model.chart, 3), Multivector.zero(model.chart, 2))
    elif kind == "cosymplectic":
        base = jacobi_defect(JacobiPair(bivector, vector))
    else:
        base = homogeneity_defect(HomogeneousPoisson(bivector, vector))
    return SplitReport(kind, model, base, out)


# -- the 2-form on normal directions --------------------------------------------------

@dataclass(frozen=True)
class ThetaForm:
    point: tuple[tuple[str, Fraction], ...]
    normal_vars: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def is_antisymmetric(self) -> bool:
        m = self.matrix
        return all(m[i][j] == -m[j][i] for i in range(len(m)) for j in range(len(m)))

    def is_nondegenerate(self) -> bool:
        return rank([list(r) for r in self.matrix]) == len(self.matrix)


def theta(JP: JacobiPair, spec: TransversalSpec, point: Mapping[str, Fraction]) -> ThetaForm:
    """Matrix of the normal 2-form at a point of a cosymplectic transversal.

    ``M`` holds the normal components of ``J#(dn_b)`` in column ``b``; the
    2-form has entries ``Theta[a][b] = (M^-1)[b][a]`` in the order of
    ``spec.normal_vars``.
    """
    point = {k: Fraction(v) for k, v in point.items()}
    cls = classify_transversal(JP, spec, point)
    if cls.kind != "cosymplectic":
        raise ExprError(f"transversal is {cls.kind} at this point, not cosymplectic")
    S = sharp_matrix(JP, point)
    idx = [JP.chart.index(v) for v in spec.normal_vars]
    M = [[S[a][b] for b in idx] for a in idx]
    try:
        Minv = inverse(M)
    except SingularMatrixError:
        raise ExprError("normal block of the sharp map is singular") from None
    m = len(idx)
    mat = tuple(tuple(Minv[b][a] for b in range(m)) for a in range(m))
    out = ThetaForm(tuple(sorted(point.items())), spec.normal_vars, mat)
    if not out.is_antisymmetric():
        raise ArithmeticError("normal 2-form came out non-antisymmetric")
    return out


# -- Euler-like vector fields -------------------------------------------------------------

@dataclass(frozen=True)
class EulerCheck:
    euler_like: bool
    block: tuple[tuple[ScalarExpr, ...], ...]


def euler_like_check(X: Multivector, spec: TransversalSpec) -> EulerCheck:
    """Test whether the normal linearization of ``X`` along ``N`` is the Euler field.

    Only the linearization is checked; completeness of the flow is not.
    """
    if X.degree != 1 or X.chart != spec.chart:
        raise ExprError("expected a vector field on the transversal's chart")
    on_n = {v: 0 for v in spec.normal_vars}
    restricted = X.restrict(on_n)
    if not restricted.is_zero:
        raise ExprError(f"vector field does not vanish on N: {restricted}")
    block = tuple(
        tuple(X.component(a).partial(b).restrict(on_n) for b in spec.normal_vars)
        for a in spec.normal_vars)
    ok = all(block[i][j] == (1 if i == j else 0) for i in range(len(block)) for j in range(len(block)))
    return EulerCheck(ok, block)


# -- constant forms and pointwise tests ----------------------------------------------------

def omega_form(chart: Chart, pairs: Sequence[tuple[str, str]] | None = None) -> LForm:
    """``sum dq_i ^ dp_i - 1* ^ sum p_i dq_i``, a dL-closed LForm.

    ``pairs`` lists the ``(q_i, p_i)`` coordinate names; by default they are
    taken from the chart's ``q``/``p`` coordinates.
    """
    if pairs is None:
        qs = [v for v in chart.vars if v.startswith("q")]
        pairs = [(q, "p" + q[1:]) for q in qs]
    plain = DiffForm.from_terms(chart, 2, [((q, p), 1) for q, p in pairs])
    jet = DiffForm.from_terms(chart, 1, [((q,), -chart.var(p)) for q, p in pairs])
    w = LForm(plain, jet)
    if not dL(w).is_zero:
        raise ArithmeticError("omega is not closed")
    return w


def in_sharp_image(P: Multivector, Z: Multivector, point: Mapping[str, Fraction]) -> bool:
    """Whether ``Z`` lies in the image of ``P#`` at a point (exact rank test)."""
    chart = P.chart
    n = chart.dim
    cols = []
    for v in chart.vars:
        img = contract(DiffForm.basis(chart, v), P)
        cols.append([img.component(w).eval(point) for w in chart.vars])
    A = [[cols[j][i] for j in range(n)] for i in range(n)]
    z = [Z.component(w).eval(point) for w in chart.vars]
    return rank(A) == rank([row + [z[i]] for i, row in enumerate(A)])
