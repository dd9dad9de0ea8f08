from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from jacobigeom.expr import Chart, ChartMismatchError, ExprError, ParseError, PoleError, UnknownVariableError
from strategies import chart_of, polys

C = Chart("c", ("x", "y"))


def as_sympy(e):
    return sympy.sympify(str(e).replace("^", "**"))


def test_parse_and_print_canonical():
    e = C.parse("(x^2 - y^2)/(x - y)")
    assert str(e) == "x + y"
    assert C.parse("2*x/(4*y)") == C.parse("x/(2*y)")
    assert str(C.parse("1/(-x)")) == "-1/x"


def test_print_reparses_to_same_value():
    e = C.parse("(3/4*x^2*y - 1)/(x + 2)")
    assert C.parse(str(e)) == e


def test_parse_errors():
    for bad in ("x +", "2**", "x $ y", "(x", "x)"):
        with pytest.raises(ParseError):
            C.parse(bad)
    with pytest.raises(UnknownVariableError):
        C.parse("z")


def test_division_by_zero_expression():
    with pytest.raises(PoleError):
        C.parse("x/(y - y)")


def test_eval_and_pole():
    e = C.parse("1/(x - 1)")
    assert e.eval({"x": 3, "y": 0}) == Fraction(1, 2)
    with pytest.raises(PoleError):
        e.eval({"x": 1, "y": 0})


def test_partial_matches_sympy():
    e = C.parse("(x^2*y + 3)/(y^2 + x)")
    x, y = sympy.symbols("x y")
    assert sympy.simplify(as_sympy(e.partial("x")) - sympy.diff(as_sympy(e), x)) == 0
    assert sympy.simplify(as_sympy(e.partial("y")) - sympy.diff(as_sympy(e), y)) == 0


def test_params_are_differentiable_but_not_coordinates():
    T = C.with_params("t")
    e = T.parse("t^2*x")
    assert e.partial("t") == T.parse("2*t*x")
    with pytest.raises(UnknownVariableError):
        T.index("t")
    assert e.restrict({"t": 3}) == T.parse("9*x")


def test_chart_validation_and_equality():
    with pytest.raises(ExprError):
        Chart("bad", ("x", "x"))
    with pytest.raises(ExprError):
        Chart("bad", ())
    assert Chart("a", ("x", "y")) == Chart("b", ("x", "y"))
    with pytest.raises(ExprError):
        C.with_params("x")


def test_to_chart_reorders_and_rejects_missing():
    D = Chart("d", ("y", "x", "z"))
    e = C.parse("x/(1 + y)")
    assert str(e.to_chart(D)) == str(D.parse("x/(1 + y)"))
    with pytest.raises((ChartMismatchError, ExprError)):
        D.parse("z").to_chart(C)


def test_substitute():
    e = C.parse("x^2 + y")
    assert e.substitute({"x": C.parse("y + 1")}) == C.parse("y^2 + 3*y + 1")


@given(st.data())
def test_field_operations_agree_with_sympy(data):
    chart = chart_of(3)
    f = data.draw(polys(chart))
    g = data.draw(polys(chart))
    h = data.draw(polys(chart)) + chart.one() * 7
    ops = [f + g, f - g, f * g]
    refs = [as_sympy(f) + as_sympy(g), as_sympy(f) - as_sympy(g), as_sympy(f) * as_sympy(g)]
    if not h.is_zero:
        ops.append(f / h)
        refs.append(as_sympy(f) / as_sympy(h))
    for got, ref in zip(ops, refs):
        assert sympy.simplify(as_sympy(got) - ref) == 0


@given(st.data())
def test_quotient_identities(data):
    chart = chart_of(2)
    f = data.draw(polys(chart))
    g = data.draw(polys(chart))
    if g.is_zero:
        g = chart.one()
    q = f / g
    assert q * g == f
    assert C.parse("1") == C.one()
    if not f.is_zero:
        assert (q * (g / f)) == chart.one()
