"""Exact scalar coefficients: rational functions over a coordinate chart.

Every tensor coefficient in the package is a :class:`ScalarExpr`, i.e. an
element of ``Q(x_1, ..., x_n)`` kept in canonical form:

* numerator and denominator are coprime,
* the denominator's leading coefficient (graded lexicographic order over the
  chart's variable order) is 1,
* zero is ``0/1``.

Two expressions are equal iff their canonical forms agree term by term, so
``==`` decides equality of rational functions.

The polynomial arithmetic and the multivariate gcd come from sympy's sparse
polynomial rings (``sympy.polys.rings``); the rational layer, the parser and
the printer live here.

Expression grammar (also emitted by :func:`to_text`)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom (("^" | "**") INTEGER)?
    atom    := NUMBER | IDENT | "(" expr ")"
    NUMBER  := DIGITS ("." DIGITS)?
    IDENT   := [A-Za-z_][A-Za-z_0-9]*
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

__all__ = [
    "Chart",
    "ScalarExpr",
    "ExprError",
    "ParseError",
    "UnknownVariableError",
    "ChartMismatchError",
    "PoleError",
    "parse",
    "to_text",
]

Number = Union[int, Fraction]
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class ExprError(ValueError):
    """Base class for malformed expressions and chart misuse."""


class ParseError(ExprError):
    def __init__(self, message: str, pos: int, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"{message} at position {pos}")


class UnknownVariableError(ExprError):
    pass


class ChartMismatchError(ExprError):
    pass


class PoleError(ZeroDivisionError):
    """Division by an identically zero expression or evaluation at a pole."""


@lru_cache(maxsize=None)
def _ring(symbols: tuple[str, ...]) -> PolyRing:
    return PolyRing(symbols, QQ, grlex)


@dataclass(frozen=True)
class Chart:
    """A coordinate chart: ordered coordinate names plus optional parameters.

    ``params`` are adjoined to the coefficient field without being coordinates
    (the formal time of a deformation family, for instance): tensors index
    only over ``vars``, but expressions may depend on and be differentiated
    with respect to parameters.
    """

    name: str = field(compare=False)
    vars: tuple[str, ...]
    params: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "params", tuple(self.params))
        if not self.vars:
            raise ExprError("a chart needs at least one variable")
        names = self.vars + self.params
        if len(set(names)) != len(names):
            raise ExprError(f"duplicate variable names in chart {self.name!r}: {names}")
        for n in names:
            if not _IDENT.match(n):
                raise ExprError(f"invalid variable name {n!r}")

    @property
    def dim(self) -> int:
        return len(self.vars)

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.vars + self.params

    @property
    def ring(self) -> PolyRing:
        return _ring(self.symbols)

    def index(self, var: str) -> int:
        """Position of a coordinate (parameters are not coordinates)."""
        try:
            return self.vars.index(var)
        except ValueError:
            raise UnknownVariableError(f"{var!r} is not a coordinate of chart {self.name!r}") from None

    def extend(self, *new_vars: str, name: str | None = None, params: tuple[str, ...] | None = None) -> "Chart":
        """A chart with extra coordinates appended (or prepended by the caller's order)."""
        clash = set(new_vars) & set(self.symbols)
        if clash:
            raise ExprError(f"variable collision: {sorted(clash)} already in chart {self.name!r}")
        return Chart(name or self.name, self.vars + tuple(new_vars),
                     self.params if params is None else params)

    def with_params(self, *params: str) -> "Chart":
        clash = set(params) & set(self.symbols)
        if clash:
            raise ExprError(f"variable collision: {sorted(clash)} already in chart {self.name!r}")
        return Chart(self.name, self.vars, self.params + tuple(params))

    def var(self, name: str) -> "ScalarExpr":
        if name not in self.symbols:
            raise UnknownVariableError(f"{name!r} is not a variable of chart {self.name!r}")
        return ScalarExpr._raw(self, self.ring.gens[self.symbols.index(name)], self.ring.one)

    def const(self, value: Number) -> "ScalarExpr":
        return ScalarExpr.const(self, value)

    def zero(self) -> "ScalarExpr":
        return ScalarExpr._raw(self, self.ring.zero, self.ring.one)

    def one(self) -> "ScalarExpr":
        return ScalarExpr._raw(self, self.ring.one, self.ring.one)

    def parse(self, src: str) -> "ScalarExpr":
        return parse(src, self)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class ScalarExpr:
    """Canonical rational function on a chart. Immutable."""

    __slots__ = ("chart", "num", "den", "_hash")

    chart: Chart
    num: PolyElement
    den: PolyElement

    def __init__(self, chart: Chart, num: PolyElement, den: PolyElement | None = None):
        ring = chart.ring
        if num.ring is not ring:
            num = num.set_ring(ring)
        if den is None:
            den = ring.one
        elif den.ring is not ring:
            den = den.set_ring(ring)
        if not den:
            raise PoleError("zero denominator")
        self.chart = chart
        self.num, self.den = _canonical(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, chart: Chart, num: PolyElement, den: PolyElement) -> "ScalarExpr":
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj.chart = chart
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def const(cls, chart: Chart, value: Number) -> "ScalarExpr":
        value = Fraction(value)
        ring = chart.ring
        return cls._raw(chart, ring(QQ(value.numerator, value.denominator)), ring.one)

    # -- inspection -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return self.den == 1

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ExprError(f"{to_text(self)} is not constant")
        return _to_fraction(self.num.LC) if self.num else Fraction(0)

    def depends_on(self, var: str) -> bool:
        i = self.chart.symbols.index(var) if var in self.chart.symbols else None
        if i is None:
            return False
        return any(m[i] for m in self.num.monoms()) or any(m[i] for m in self.den.monoms())

    def free_vars(self) -> tuple[str, ...]:
        return tuple(v for v in self.chart.symbols if self.depends_on(v))

    def degree_in(self, var: str) -> tuple[int, int]:
        """(numerator degree, denominator degree) in one variable."""
        i = self.chart.symbols.index(var)
        return (max((m[i] for m in self.num.monoms()), default=0) if self.num else 0,
                max((m[i] for m in self.den.monoms()), default=0))

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "ScalarExpr":
        if isinstance(other, ScalarExpr):
            if other.chart != self.chart:
                raise ChartMismatchError(f"charts differ: {self.chart.name!r} vs {other.chart.name!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return ScalarExpr.const(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if self.den == 1:
                return ScalarExpr._raw(self.chart, self.num + other.num, self.den)
            return ScalarExpr(self.chart, self.num + other.num, self.den)
        return ScalarExpr(self.chart, self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr._raw(self.chart, -self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return self.chart.zero()
        if self.den == 1 and other.den == 1:
            return ScalarExpr._raw(self.chart, self.num * other.num, self.den)
        if other.is_constant:
            return ScalarExpr._raw(self.chart, self.num * other.num.LC, self.den)
        if self.is_constant:
            return ScalarExpr._raw(self.chart, other.num * self.num.LC, other.den)
        return ScalarExpr(self.chart, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "ScalarExpr":
        if not self.num:
            raise PoleError("division by an identically zero expression")
        return ScalarExpr(self.chart, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise PoleError("division by an identically zero expression")
        if other.is_constant:
            return ScalarExpr._raw(self.chart, self.num.quo_ground(other.num.LC), self.den)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ExprError("only integer exponents are supported")
        if n < 0:
            return self.inverse() ** (-n)
        return ScalarExpr._raw(self.chart, self.num ** n, self.den ** n)

    # -- calculus ---------------------------------------------------------
    def partial(self, var: str) -> "ScalarExpr":
        if var not in self.chart.symbols:
            raise UnknownVariableError(f"{var!r} is not a variable of chart {self.chart.name!r}")
        x = self.chart.ring.gens[self.chart.symbols.index(var)]
        if self.den == 1:
            return ScalarExpr._raw(self.chart, self.num.diff(x), self.den)
        dn = self.num.diff(x)
        dd = self.den.diff(x)
        return ScalarExpr(self.chart, dn * self.den - self.num * dd, self.den ** 2)

    # -- evaluation and substitution -------------------------------------
    def eval(self, point: Mapping[str, Number]) -> Fraction:
        vals = []
        for v in self.chart.symbols:
            if v not in point:
                if self.depends_on(v):
                    raise ExprError(f"evaluation point does not assign {v!r}")
                vals.append(QQ(0))
            else:
                f = Fraction(point[v])
                vals.append(QQ(f.numerator, f.denominator))
        d = self.den(*vals) if self.den.ring.ngens > 1 else self.den(vals[0])
        if d == 0:
            raise PoleError(f"{to_text(self)} has a pole at {dict(point)}")
        n = self.num(*vals) if self.num.ring.ngens > 1 else self.num(vals[0])
        return _to_fraction(n) / _to_fraction(d)

    def eval_float(self, point: Mapping[str, float]) -> float:
        vals = [float(point.get(v, 0.0)) for v in self.chart.symbols]
        return _poly_float(self.num, vals) / _poly_float(self.den, vals)

    def substitute(self, mapping: Mapping[str, "ScalarExpr | Number"], target: Chart | None = None) -> "ScalarExpr":
        """Replace variables by expressions on ``target`` (default: same chart).

        Variables not in ``mapping`` are carried over by name, so they must
        exist in ``target``.
        """
        target = target or self.chart
        vals = []
        for v in self.chart.symbols:
            if v in mapping:
                m = mapping[v]
                vals.append(m if isinstance(m, ScalarExpr) else ScalarExpr.const(target, m))
            else:
                vals.append(target.var(v))
        for val in vals:
            if val.chart != target:
                raise ChartMismatchError("substitution values must live on the target chart")
        return _poly_subs(self.num, vals, target) / _poly_subs(self.den, vals, target)

    def restrict(self, values: Mapping[str, Number]) -> "ScalarExpr":
        """Set some variables to rational constants, staying on the same chart."""
        num, den = self.num, self.den
        ring = self.chart.ring
        for v, c in values.items():
            c = Fraction(c)
            x = ring.gens[self.chart.symbols.index(v)]
            num = num.subs(x, QQ(c.numerator, c.denominator))
            den = den.subs(x, QQ(c.numerator, c.denominator))
        if not den:
            raise PoleError(f"{to_text(self)} has a pole on {dict(values)}")
        return ScalarExpr(self.chart, num, den)

    def to_chart(self, chart: Chart) -> "ScalarExpr":
        """Reinterpret on another chart containing every variable this depends on."""
        if chart == self.chart:
            return self
        missing = [v for v in self.free_vars() if v not in chart.symbols]
        if missing:
            raise ChartMismatchError(f"variables {missing} are not in chart {chart.name!r}")
        num, den = self.num.set_ring(chart.ring), self.den.set_ring(chart.ring)
        if den.is_ground:
            return ScalarExpr._raw(chart, num, den)
        # the monomial order may change with the variable order
        return ScalarExpr(chart, num, den)

    # -- comparison, hashing, printing -----------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.den == 1 and self.num == QQ(Fraction(other).numerator, Fraction(other).denominator)
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        return self.chart == other.chart and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"ScalarExpr({to_text(self)!r})"


def _canonical(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if den.is_ground:
        c = den.LC
        return (num if c == 1 else num.quo_ground(c)), ring.one
    _, num, den = num.cofactors(den)
    c = den.LC
    if c != 1:
        num = num.quo_ground(c)
        den = den.quo_ground(c)
    return num, den


def _poly_float(p: PolyElement, vals: list[float]) -> float:
    total = 0.0
    for mon, c in p.items():
        term = float(c)
        for x, e in zip(vals, mon):
            if e:
                term *= x ** e
        total += term
    return total


def _poly_subs(p: PolyElement, vals: list[ScalarExpr], target: Chart) -> ScalarExpr:
    powers: dict[tuple[int, int], ScalarExpr] = {}
    total = target.zero()
    for mon, c in p.items():
        term = ScalarExpr.const(target, _to_fraction(c))
        for i, e in enumerate(mon):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = vals[i] ** e
                term = term * powers[key]
        total = total + term
    return total


# -- printing --------------------------------------------------------------

def _frac_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _monomial_text(symbols: tuple[str, ...], mon: tuple[int, ...]) -> str:
    parts = []
    for s, e in zip(symbols, mon):
        if e == 1:
            parts.append(s)
        elif e > 1:
            parts.append(f"{s}^{e}")
    return "*".join(parts)


def _poly_text(p: PolyElement, symbols: tuple[str, ...]) -> str:
    if not p:
        return "0"
    terms = sorted(p.items(), key=lambda t: grlex(t[0]), reverse=True)
    out = []
    for k, (mon, c) in enumerate(terms):
        c = _to_fraction(c)
        neg = c < 0
        a = -c if neg else c
        mtext = _monomial_text(symbols, mon)
        if not mtext:
            body = _frac_text(a)
        elif a == 1:
            body = mtext
        else:
            body = f"{_frac_text(a)}*{mtext}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def to_text(e: ScalarExpr) -> str:
    """Canonical printer; the output reparses to the same canonical form."""
    symbols = e.chart.symbols
    num = _poly_text(e.num, symbols)
    if e.den == 1:
        return num
    den = _poly_text(e.den, symbols)
    if len(e.num) > 1:
        num = f"({num})"
    if len(e.den) > 1 or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            start = pos + (len(src[pos:]) - len(src[pos:].lstrip()))
            raise ParseError(f"unexpected character {src[start]!r}", start, src)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("ident", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src: str, chart: Chart):
        self.src = src
        self.chart = chart
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val or 'end of input'!r}", pos, self.src)

    def parse(self) -> ScalarExpr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos, self.src)
        return e

    def expr(self) -> ScalarExpr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> ScalarExpr:
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            start = self.i
            rhs_pos = self.peek()[2]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if rhs.is_zero:
                    if self.i - start == 1 and self.tokens[start][0] == "num":
                        raise ParseError("division by zero constant", rhs_pos, self.src)
                    raise PoleError(f"division by an identically zero expression at position {rhs_pos}")
                e = e / rhs
        return e

    def unary(self) -> ScalarExpr:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            e = self.unary()
            return -e if val == "-" else e
        return self.power()

    def power(self) -> ScalarExpr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val in ("^", "**"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or "." in val:
                raise ParseError("exponent must be a nonnegative integer", pos, self.src)
            return base ** int(val)
        return base

    def atom(self) -> ScalarExpr:
        kind, val, pos = self.take()
        if kind == "num":
            return ScalarExpr.const(self.chart, Fraction(val))
        if kind == "ident":
            if val not in self.chart.symbols:
                raise UnknownVariableError(f"unknown variable {val!r} at position {pos}")
            return self.chart.var(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.src)


def parse(src: str, chart: Chart) -> ScalarExpr:
    """Parse ``src`` into a canonical :class:`ScalarExpr` on ``chart``."""
    return _Parser(src, chart).parse()
