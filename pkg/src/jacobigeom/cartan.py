"""Multivector fields, differential forms and the Der-complex of a trivial line bundle.

Tensors are sparse maps from strictly increasing index tuples to
:class:`~jacobigeom.expr.ScalarExpr`; an absent key means a zero coefficient.
A :class:`Multivector` with key ``(i, j)`` and coefficient ``c`` stands for
``c * d_i ^ d_j``, a :class:`DiffForm` likewise for ``c * dx^i ^ dx^j``.

The Der-complex of the trivial line bundle ``R_M`` is stored componentwise:
an :class:`LForm` of degree ``k`` is ``plain + 1* ^ jet`` with ``plain`` a
``k``-form and ``jet`` a ``(k-1)``-form. Derivations of ``R_M`` are pairs
``(X, f)`` acting on sections by ``lam -> X(lam) + f*lam``.

Sign conventions (regression-locked in the test suite):

* ``schouten`` is the odd Poisson bracket on polyvectors written in odd
  coordinates ``theta_i = d_i``::

      [P, Q] = sum_i (P <d/dtheta_i) ^ d_i Q  -  d_i P ^ (d/dtheta_i> Q)

  with the right derivative on ``P`` and the left derivative on ``Q``.  It
  restricts to the Lie bracket on vector fields, gives ``[X, f] = X(f)``,
  is graded antisymmetric ``[P,Q] = -(-1)^((p-1)(q-1)) [Q,P]`` and a left
  graded derivation ``[P, Q^R] = [P,Q]^R + (-1)^((p-1)q) Q^[P,R]``.
* ``contract(alpha, P)`` inserts a 1-form into the *first* slot of ``P``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Iterable, Mapping, Sequence, Union

from .expr import Chart, ChartMismatchError, ExprError, ScalarExpr

__all__ = [
    "Multivector",
    "DiffForm",
    "LForm",
    "Derivation",
    "wedge",
    "schouten",
    "lie_bracket",
    "lie_multivector",
    "interior",
    "contract",
    "pair",
    "apply_vector",
    "d",
    "differential",
    "dL",
    "iota",
    "lieD",
    "pushforward",
]

Coeffs = dict[tuple[int, ...], ScalarExpr]
Scalar = Union[ScalarExpr, int, Fraction]


def _merge(I: tuple[int, ...], J: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted union of two disjoint increasing tuples, or None on overlap."""
    if not I:
        return 1, J
    if not J:
        return 1, I
    inversions = 0
    out = []
    a = b = 0
    while a < len(I) and b < len(J):
        if I[a] == J[b]:
            return None
        if I[a] < J[b]:
            out.append(I[a])
            a += 1
        else:
            out.append(J[b])
            inversions += len(I) - a
            b += 1
    out.extend(I[a:])
    out.extend(J[b:])
    return (-1 if inversions % 2 else 1), tuple(out)


def _sort_indices(idx: Sequence[int]) -> tuple[int, tuple[int, ...]] | None:
    """Sign of the sorting permutation and the sorted tuple; None on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


def _wedge_coeffs(A: Coeffs, B: Coeffs) -> Coeffs:
    out: Coeffs = {}
    for I, a in A.items():
        for J, b in B.items():
            m = _merge(I, J)
            if m is None:
                continue
            sign, K = m
            term = a * b
            if sign < 0:
                term = -term
            if K in out:
                s = out[K] + term
                if s.is_zero:
                    del out[K]
                else:
                    out[K] = s
            elif not term.is_zero:
                out[K] = term
    return out


def _add_coeffs(A: Coeffs, B: Coeffs, sign: int = 1) -> Coeffs:
    out = dict(A)
    for K, b in B.items():
        if K in out:
            s = out[K] + b if sign > 0 else out[K] - b
            if s.is_zero:
                del out[K]
            else:
                out[K] = s
        else:
            out[K] = b if sign > 0 else -b
    return out


def _as_scalar(chart: Chart, c: Scalar) -> ScalarExpr:
    if isinstance(c, ScalarExpr):
        if c.chart != chart:
            raise ChartMismatchError(f"charts differ: {chart.name!r} vs {c.chart.name!r}")
        return c
    return ScalarExpr.const(chart, c)


class _Alternating:
    """Shared machinery of multivectors and forms."""

    __slots__ = ("chart", "degree", "coeffs")
    kind = "alternating"

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[tuple[int, ...], ScalarExpr] | None = None):
        if degree < -1 or degree > chart.dim + 1:
            raise ExprError(f"degree {degree} out of range on a chart of dimension {chart.dim}")
        clean: Coeffs = {}
        for I, c in (coeffs or {}).items():
            I = tuple(I)
            if len(I) != degree or any(i < 0 or i >= chart.dim for i in I) or any(
                    I[k] >= I[k + 1] for k in range(len(I) - 1)):
                raise ExprError(f"bad index set {I} for degree {degree} on chart {chart.name!r}")
            c = _as_scalar(chart, c)
            if not c.is_zero:
                clean[I] = c
        self.chart = chart
        self.degree = degree
        self.coeffs = clean

    @classmethod
    def _make(cls, chart: Chart, degree: int, coeffs: Coeffs):
        obj = object.__new__(cls)
        obj.chart = chart
        obj.degree = degree
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, chart: Chart, degree: int):
        return cls._make(chart, degree, {})

    @classmethod
    def from_terms(cls, chart: Chart, degree: int, terms: Iterable[tuple[Sequence, Scalar | str]]):
        """Build from ``(index names or positions, coefficient)`` pairs.

        Index names may come in any order; the coefficient picks up the sign
        of the sorting permutation. Repeated pairs accumulate.
        """
        coeffs: Coeffs = {}
        for idx, c in terms:
            pos = [chart.index(i) if isinstance(i, str) else int(i) for i in idx]
            if len(pos) != degree:
                raise ExprError(f"index set {tuple(idx)} does not have {degree} entries")
            s = _sort_indices(pos)
            if s is None:
                raise ExprError(f"repeated index in {tuple(idx)}")
            sign, I = s
            val = chart.parse(c) if isinstance(c, str) else _as_scalar(chart, c)
            if sign < 0:
                val = -val
            coeffs = _add_coeffs(coeffs, {I: val})
        return cls(chart, degree, coeffs)

    @classmethod
    def basis(cls, chart: Chart, *names: str):
        """The coordinate element ``d_a ^ d_b ^ ...`` (or ``dx^a ^ ...``)."""
        return cls.from_terms(chart, len(names), [(names, 1)])

    # -- vector space structure ------------------------------------------
    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.chart != self.chart:
            raise ChartMismatchError(f"charts differ: {self.chart.name!r} vs {other.chart.name!r}")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise ExprError(f"cannot add degree {self.degree} and degree {other.degree}")
        return self._make(self.chart, self.degree, _add_coeffs(self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise ExprError(f"cannot subtract degree {other.degree} from degree {self.degree}")
        return self._make(self.chart, self.degree, _add_coeffs(self.coeffs, other.coeffs, -1))

    def __neg__(self):
        return self._make(self.chart, self.degree, {I: -c for I, c in self.coeffs.items()})

    def __mul__(self, c: Scalar):
        if isinstance(c, _Alternating):
            return NotImplemented
        c = _as_scalar(self.chart, c)
        if c.is_zero:
            return self.zero(self.chart, self.degree)
        return self._make(self.chart, self.degree, {I: a * c for I, a in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.chart == other.chart and self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((type(self).__name__, self.chart, self.degree, frozenset(self.coeffs.items())))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, idx) -> ScalarExpr:
        """Coefficient at an index set given by names or positions (any order)."""
        if isinstance(idx, (str, int)):
            idx = (idx,)
        pos = [self.chart.index(i) if isinstance(i, str) else int(i) for i in idx]
        s = _sort_indices(pos)
        if s is None:
            return self.chart.zero()
        sign, I = s
        c = self.coeffs.get(I)
        if c is None:
            return self.chart.zero()
        return c if sign > 0 else -c

    def map_coeffs(self, fn: Callable[[ScalarExpr], ScalarExpr], chart: Chart | None = None):
        chart = chart or self.chart
        out: Coeffs = {}
        for I, c in self.coeffs.items():
            v = fn(c)
            if not v.is_zero:
                out[I] = v
        return self._make(chart, self.degree, out)

    def partial(self, var: str):
        return self.map_coeffs(lambda c: c.partial(var))

    def restrict(self, values: Mapping[str, int | Fraction]):
        return self.map_coeffs(lambda c: c.restrict(values))

    def eval(self, point: Mapping[str, int | Fraction]) -> dict[tuple[int, ...], Fraction]:
        return {I: c.eval(point) for I, c in self.coeffs.items()}

    def to_chart(self, chart: Chart):
        """Re-express on a chart containing every coordinate this tensor uses (matched by name)."""
        if chart == self.chart:
            return self
        out: Coeffs = {}
        for I, c in self.coeffs.items():
            sign, J = _sort_indices([chart.index(self.chart.vars[i]) for i in I])
            cc = c.to_chart(chart)
            out[J] = cc if sign > 0 else -cc
        return self._make(chart, self.degree, out)

    def depends_on(self, var: str) -> bool:
        return any(c.depends_on(var) for c in self.coeffs.values())

    def uses_index(self, var: str) -> bool:
        i = self.chart.index(var)
        return any(i in I for I in self.coeffs)

    def terms(self) -> list[tuple[tuple[str, ...], ScalarExpr]]:
        """Nonzero coefficients keyed by variable names, in index order."""
        return [(tuple(self.chart.vars[i] for i in I), self.coeffs[I]) for I in sorted(self.coeffs)]

    def _symbol(self, I: tuple[int, ...]) -> str:
        raise NotImplementedError

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for I in sorted(self.coeffs):
            parts.append(f"({self.coeffs[I]})*{self._symbol(I)}" if I else f"({self.coeffs[I]})")
        return " + ".join(parts)

    def __repr__(self):
        return f"{type(self).__name__}<{self.degree}>({self})"


class Multivector(_Alternating):
    """Antisymmetric contravariant tensor field; degree 0 is a function."""

    __slots__ = ()
    kind = "multivector"

    def _symbol(self, I):
        return "^".join(f"d_{self.chart.vars[i]}" for i in I)

    @classmethod
    def vector(cls, chart: Chart, components: Mapping[str, Scalar | str]) -> "Multivector":
        return cls.from_terms(chart, 1, [((v,), c) for v, c in components.items()])

    @classmethod
    def function(cls, f: ScalarExpr) -> "Multivector":
        return cls(f.chart, 0, {(): f})

    def component(self, var: str) -> ScalarExpr:
        """Coefficient of ``d_var`` in a vector field."""
        if self.degree != 1:
            raise ExprError("component() needs a vector field")
        return self.coeffs.get((self.chart.index(var),), self.chart.zero())


class DiffForm(_Alternating):
    """Differential form; degree 0 is a function, degree -1 is the zero placeholder."""

    __slots__ = ()
    kind = "form"

    def _symbol(self, I):
        return "^".join(f"d{self.chart.vars[i]}" for i in I)

    @classmethod
    def one_form(cls, chart: Chart, components: Mapping[str, Scalar | str]) -> "DiffForm":
        return cls.from_terms(chart, 1, [((v,), c) for v, c in components.items()])

    @classmethod
    def function(cls, f: ScalarExpr) -> "DiffForm":
        return cls(f.chart, 0, {(): f})

    def scalar(self) -> ScalarExpr:
        if self.degree != 0:
            raise ExprError("scalar() needs a 0-form")
        return self.coeffs.get((), self.chart.zero())


# -- exterior algebra -------------------------------------------------------

def wedge(a, b):
    """Graded product of two multivectors, two forms or two LForms."""
    if isinstance(a, LForm) or isinstance(b, LForm):
        return _lform_wedge(a, b)
    a._check(b)
    deg = a.degree + b.degree
    if a.degree < 0 or b.degree < 0 or deg > a.chart.dim:
        # vanishes for degree reasons; keep the graded degree
        return type(a).zero(a.chart, max(-1, deg))
    return type(a)._make(a.chart, deg, _wedge_coeffs(a.coeffs, b.coeffs))


def _theta_derivative(P: Multivector, i: int, right: bool) -> Coeffs:
    out: Coeffs = {}
    k = P.degree
    for I, c in P.coeffs.items():
        if i in I:
            m = I.index(i)
            flips = (k - 1 - m) if right else m
            out[I[:m] + I[m + 1:]] = -c if flips % 2 else c
    return out


def schouten(P: Multivector, Q: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket ``[P, Q]`` of degree ``p + q - 1``."""
    if not isinstance(P, Multivector) or not isinstance(Q, Multivector):
        raise TypeError("schouten() takes two Multivectors")
    P._check(Q)
    chart = P.chart
    deg = P.degree + Q.degree - 1
    if deg < 0 or deg > chart.dim or P.is_zero or Q.is_zero:
        return Multivector.zero(chart, max(-1, deg))
    total: Coeffs = {}
    for i, x in enumerate(chart.vars):
        A = _theta_derivative(P, i, right=True)
        if A:
            B = {I: c.partial(x) for I, c in Q.coeffs.items()}
            B = {I: c for I, c in B.items() if not c.is_zero}
            if B:
                total = _add_coeffs(total, _wedge_coeffs(A, B))
        D = _theta_derivative(Q, i, right=False)
        if D:
            C = {I: c.partial(x) for I, c in P.coeffs.items()}
            C = {I: c for I, c in C.items() if not c.is_zero}
            if C:
                total = _add_coeffs(total, _wedge_coeffs(C, D), -1)
    return Multivector._make(chart, deg, total)


def apply_vector(X: Multivector, f: ScalarExpr) -> ScalarExpr:
    """Directional derivative ``X(f)``."""
    if X.degree != 1:
        raise ExprError("apply_vector() needs a vector field")
    out = X.chart.zero()
    for (i,), c in X.coeffs.items():
        df = f.partial(X.chart.vars[i])
        if not df.is_zero:
            out = out + c * df
    return out


def lie_bracket(X: Multivector, Y: Multivector) -> Multivector:
    """Commutator of vector fields, computed componentwise."""
    X._check(Y)
    chart = X.chart
    comps = {}
    for j, y in enumerate(chart.vars):
        comps[(j,)] = apply_vector(X, Y.coeffs.get((j,), chart.zero())) - apply_vector(
            Y, X.coeffs.get((j,), chart.zero()))
    return Multivector(chart, 1, comps)


def lie_multivector(X: Multivector, P: Multivector) -> Multivector:
    """Lie derivative of a multivector field along a vector field."""
    if X.degree != 1:
        raise ExprError("lie_multivector() differentiates along a vector field")
    return schouten(X, P)


def interior(X: Multivector, w: DiffForm) -> DiffForm:
    """Insertion ``i_X w`` of a vector field into the first slot of a form."""
    _same_chart(X, w)
    if X.degree != 1:
        raise ExprError("interior() inserts a vector field")
    if w.degree <= 0:
        return DiffForm.zero(w.chart, w.degree - 1)
    out: Coeffs = {}
    for I, c in w.coeffs.items():
        for m, i in enumerate(I):
            x = X.coeffs.get((i,))
            if x is None:
                continue
            term = c * x
            if m % 2:
                term = -term
            out = _add_coeffs(out, {I[:m] + I[m + 1:]: term})
    return DiffForm._make(w.chart, w.degree - 1, out)


def contract(alpha: DiffForm, P: Multivector) -> Multivector:
    """Insertion of a 1-form into the first slot of a multivector (``Lambda^sharp``)."""
    _same_chart(alpha, P)
    if alpha.degree != 1:
        raise ExprError("contract() inserts a 1-form")
    if P.degree <= 0:
        return Multivector.zero(P.chart, P.degree - 1)
    out: Coeffs = {}
    for I, c in P.coeffs.items():
        for m, i in enumerate(I):
            a = alpha.coeffs.get((i,))
            if a is None:
                continue
            term = c * a
            if m % 2:
                term = -term
            out = _add_coeffs(out, {I[:m] + I[m + 1:]: term})
    return Multivector._make(P.chart, P.degree - 1, out)


def pair(P: Multivector, w: DiffForm) -> ScalarExpr:
    """Full contraction of a k-vector with a k-form (determinant normalization)."""
    _same_chart(P, w)
    if P.degree != w.degree:
        raise ExprError("pair() needs equal degrees")
    out = P.chart.zero()
    for I, c in P.coeffs.items():
        o = w.coeffs.get(I)
        if o is not None:
            out = out + c * o
    return out


def _same_chart(a, b):
    if a.chart != b.chart:
        raise ChartMismatchError(f"charts differ: {a.chart.name!r} vs {b.chart.name!r}")


def d(w: DiffForm) -> DiffForm:
    """de Rham differential."""
    chart = w.chart
    if w.degree < 0:
        return DiffForm.zero(chart, w.degree + 1)
    if w.degree >= chart.dim:
        return DiffForm.zero(chart, w.degree + 1)
    out: Coeffs = {}
    for I, c in w.coeffs.items():
        for j, x in enumerate(chart.vars):
            if j in I:
                continue
            dc = c.partial(x)
            if dc.is_zero:
                continue
            sign, K = _merge((j,), I)
            out = _add_coeffs(out, {K: dc if sign > 0 else -dc})
    return DiffForm._make(chart, w.degree + 1, out)


def differential(f: ScalarExpr) -> DiffForm:
    return d(DiffForm.function(f))


# -- the Der-complex of a trivial line bundle ---------------------------------

class LForm:
    """Element ``plain + 1* ^ jet`` of the Der-complex of the trivial line bundle."""

    __slots__ = ("chart", "degree", "plain", "jet")

    def __init__(self, plain: DiffForm, jet: DiffForm | None = None):
        chart = plain.chart
        if jet is None:
            jet = DiffForm.zero(chart, plain.degree - 1)
        if jet.chart != chart:
            raise ChartMismatchError("plain and jet parts must share a chart")
        if jet.degree != plain.degree - 1:
            raise ExprError(f"jet part has degree {jet.degree}, expected {plain.degree - 1}")
        self.chart = chart
        self.degree = plain.degree
        self.plain = plain
        self.jet = jet

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "LForm":
        return cls(DiffForm.zero(chart, degree), DiffForm.zero(chart, degree - 1))

    @classmethod
    def scalar(cls, f: ScalarExpr) -> "LForm":
        """A section of L viewed as a degree-0 LForm."""
        return cls(DiffForm.function(f))

    @classmethod
    def one_star(cls, chart: Chart) -> "LForm":
        """The canonical section ``1*``."""
        return cls(DiffForm.zero(chart, 1), DiffForm.function(chart.one()))

    def __add__(self, other: "LForm") -> "LForm":
        return LForm(self.plain + other.plain, self.jet + other.jet)

    def __sub__(self, other: "LForm") -> "LForm":
        return LForm(self.plain - other.plain, self.jet - other.jet)

    def __neg__(self) -> "LForm":
        return LForm(-self.plain, -self.jet)

    def __mul__(self, c: Scalar) -> "LForm":
        if isinstance(c, LForm):
            return NotImplemented
        return LForm(self.plain * c, self.jet * c)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, LForm):
            return NotImplemented
        return self.plain == other.plain and self.jet == other.jet

    def __hash__(self):
        return hash((self.plain, self.jet))

    @property
    def is_zero(self) -> bool:
        return self.plain.is_zero and self.jet.is_zero

    def map_coeffs(self, fn, chart: Chart | None = None) -> "LForm":
        return LForm(self.plain.map_coeffs(fn, chart), self.jet.map_coeffs(fn, chart))

    def partial(self, var: str) -> "LForm":
        return LForm(self.plain.partial(var), self.jet.partial(var))

    def restrict(self, values) -> "LForm":
        return LForm(self.plain.restrict(values), self.jet.restrict(values))

    def __str__(self):
        if self.jet.is_zero:
            return str(self.plain)
        jet = f"1*^({self.jet})"
        return jet if self.plain.is_zero else f"{self.plain} + {jet}"

    def __repr__(self):
        return f"LForm<{self.degree}>({self})"


def _lform_wedge(a, b) -> LForm:
    if isinstance(a, DiffForm):
        a = LForm(a)
    if isinstance(b, DiffForm):
        b = LForm(b)
    if a.chart != b.chart:
        raise ChartMismatchError(f"charts differ: {a.chart.name!r} vs {b.chart.name!r}")
    plain = wedge(a.plain, b.plain)
    t1 = wedge(a.plain, b.jet)
    if a.degree % 2:
        t1 = -t1
    jet = t1 + wedge(a.jet, b.plain)
    return LForm(plain, jet)


def dL(w: LForm) -> LForm:
    """``d_L(eta + 1*^theta) = d eta + 1* ^ (eta - d theta)``."""
    return LForm(d(w.plain), w.plain - d(w.jet))


class Derivation:
    """Derivation ``(X, f)`` of the trivial line bundle: ``lam -> X(lam) + f*lam``."""

    __slots__ = ("chart", "symbol", "scalar")

    def __init__(self, symbol: Multivector, scalar: ScalarExpr | None = None):
        if symbol.degree != 1:
            raise ExprError("the symbol of a derivation is a vector field")
        chart = symbol.chart
        self.chart = chart
        self.symbol = symbol
        self.scalar = chart.zero() if scalar is None else _as_scalar(chart, scalar)

    @classmethod
    def zero(cls, chart: Chart) -> "Derivation":
        return cls(Multivector.zero(chart, 1))

    @classmethod
    def identity(cls, chart: Chart) -> "Derivation":
        """The identity derivation ``1 = (0, 1)``."""
        return cls(Multivector.zero(chart, 1), chart.one())

    def __call__(self, lam: ScalarExpr) -> ScalarExpr:
        return apply_vector(self.symbol, lam) + self.scalar * lam

    def bracket(self, other: "Derivation") -> "Derivation":
        """Commutator ``([X,Y], X(g) - Y(f))``."""
        return Derivation(lie_bracket(self.symbol, other.symbol),
                          apply_vector(self.symbol, other.scalar) - apply_vector(other.symbol, self.scalar))

    def __add__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.symbol + other.symbol, self.scalar + other.scalar)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return Derivation(self.symbol - other.symbol, self.scalar - other.scalar)

    def __neg__(self) -> "Derivation":
        return Derivation(-self.symbol, -self.scalar)

    def __mul__(self, c: Scalar) -> "Derivation":
        c = _as_scalar(self.chart, c)
        return Derivation(self.symbol * c, self.scalar * c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.symbol == other.symbol and self.scalar == other.scalar

    def __hash__(self):
        return hash((self.symbol, self.scalar))

    @property
    def is_zero(self) -> bool:
        return self.symbol.is_zero and self.scalar.is_zero

    def components(self) -> list[ScalarExpr]:
        """Fiber components in the basis ``(d_1, ..., d_n, 1)``."""
        return [self.symbol.component(v) for v in self.chart.vars] + [self.scalar]

    def __str__(self):
        return f"({self.symbol}; {self.scalar})"

    def __repr__(self):
        return f"Derivation{self}"


def iota(D: Derivation, w: LForm) -> LForm:
    """``i_(X,f)(eta + 1*^theta) = i_X eta + f theta - 1* ^ i_X theta``."""
    if D.chart != w.chart:
        raise ChartMismatchError(f"charts differ: {D.chart.name!r} vs {w.chart.name!r}")
    if w.degree < 1:
        raise ExprError("cannot contract a degree-0 LForm")
    return LForm(interior(D.symbol, w.plain) + w.jet * D.scalar, -interior(D.symbol, w.jet))


def lieD(D: Derivation, w: LForm) -> LForm:
    """Lie derivative by Cartan's formula ``i_D d_L + d_L i_D``."""
    if D.chart != w.chart:
        raise ChartMismatchError(f"charts differ: {D.chart.name!r} vs {w.chart.name!r}")
    out = iota(D, dL(w))
    if w.degree >= 1:
        out = out + dL(iota(D, w))
    return out


# -- change of coordinates ------------------------------------------------------

def pushforward(P: Multivector, forward: Mapping[str, ScalarExpr], inverse: Mapping[str, ScalarExpr],
                target: Chart) -> Multivector:
    """Push a multivector along a coordinate change ``y = F(x)`` with inverse ``x = G(y)``.

    ``forward`` maps each target coordinate to an expression on ``P.chart``;
    ``inverse`` maps each source coordinate to an expression on ``target``.
    """
    src = P.chart
    jac = {(b, a): forward[target.vars[b]].partial(src.vars[a]) for b in range(target.dim) for a in range(src.dim)}
    out: Coeffs = {}
    k = P.degree
    for I, c in P.coeffs.items():
        for J in combinations(range(target.dim), k):
            # determinant of the k x k minor jac[J, I]
            det = src.zero()
            for perm in permutations(range(k)):
                sign = _sort_indices(perm)[0]
                term = src.one()
                for r, s in enumerate(perm):
                    term = term * jac[(J[r], I[s])]
                    if term.is_zero:
                        break
                det = det + term if sign > 0 else det - term
            if det.is_zero:
                continue
            out = _add_coeffs(out, {J: c * det})
    subs = {v: inverse[v] for v in src.symbols if v in inverse}
    final: Coeffs = {}
    for J, c in out.items():
        v = c.substitute(subs, target)
        if not v.is_zero:
            final[J] = v
    return Multivector._make(target, k, final)
