import pytest
import sympy
from hypothesis import given, settings

import oracles
from families import jacobi_pairs
from jacobigeom.cartan import Multivector, pushforward, schouten
from jacobigeom.expr import Chart, ExprError
from jacobigeom.homog import (HomogeneityError, HomogeneousPoisson, dehomogenize, equivalence_check,
                              homogeneity_defect, homogenize)
from jacobigeom.jacobi import JacobiPair, jacobi_bracket
from jacobigeom.split import assemble_homogeneous_poisson

C3 = Chart("c3", ("u", "q", "p"))
CONTACT = JacobiPair(Multivector.from_terms(C3, 2, [(("u", "p"), "p"), (("q", "p"), "1")]),
                     Multivector.basis(C3, "u"))


def test_zero_pair():
    HP = homogenize(JacobiPair.zero(C3), "s")
    assert HP.bivector.is_zero
    assert HP.homogeneity == Multivector.vector(HP.chart, {"s": HP.chart.var("s")})
    assert HP.is_homogeneous_poisson()


def test_contact_value():
    HP = homogenize(CONTACT, "s")
    H = HP.chart
    assert H.vars == ("s", "u", "q", "p")
    assert HP.bivector == Multivector.from_terms(H, 2, [(("s", "u"), "1"), (("u", "p"), "p/s"), (("q", "p"), "1/s")])
    assert HP.is_homogeneous_poisson()
    assert dehomogenize(HP, "s") == CONTACT


def test_collision():
    with pytest.raises(ExprError):
        homogenize(CONTACT, "q")


def test_dehomogenize_rejects_wrong_shapes():
    H = Chart("h", ("s", "q", "p"))
    s_ds = Multivector.vector(H, {"s": H.var("s")})
    with pytest.raises(HomogeneityError):
        dehomogenize(HomogeneousPoisson(Multivector.zero(H, 2), s_ds * 2), "s")
    # a coefficient that is not of weight -1 leaves s behind
    bad = Multivector.from_terms(H, 2, [(("q", "p"), "1")])
    with pytest.raises(HomogeneityError):
        dehomogenize(HomogeneousPoisson(bad, s_ds), "s")


def test_case_i_coordinates_match_homogenized_contact():
    """On (s, u, q, p) put Q1 = q, P1 = -s p, Q2 = u, P2 = s - 1."""
    HP = homogenize(CONTACT, "s")
    H = HP.chart
    model = assemble_homogeneous_poisson(None, None, 2, "i")
    T = model.chart
    fwd = {"q1": H.parse("q"), "p1": H.parse("-s*p"), "q2": H.parse("u"), "p2": H.parse("s - 1")}
    inv = {"s": T.parse("p2 + 1"), "u": T.parse("q2"), "q": T.parse("q1"), "p": T.parse("-p1/(p2 + 1)")}
    assert pushforward(HP.bivector, fwd, inv, T) == model.bivector
    assert pushforward(HP.homogeneity, fwd, inv, T) == model.homogeneity


@given(jacobi_pairs())
@settings(max_examples=15)
def test_poisson_bracket_of_weight_one_functions(JP):
    """{s f, s g} = s {f, g}_J, computed with the reference bracket."""
    HP = homogenize(JP, "s")
    xs = oracles.symbols(HP.chart.vars)
    s, rest = xs[0], xs[1:]
    f, g = rest[0] * rest[-1] + 1, rest[1] ** 2 - rest[0]
    M = oracles.bivector_matrix(HP.bivector, xs)
    lhs = oracles.jacobi_bracket(M, [0] * len(xs), xs, s * f, s * g)
    base = JP.chart
    fj = base.parse(str(f).replace("**", "^"))
    gj = base.parse(str(g).replace("**", "^"))
    rhs = s * sympy.sympify(str(jacobi_bracket(JP, fj, gj)).replace("^", "**"), locals={str(x): x for x in xs})
    assert sympy.simplify(lhs - rhs) == 0


@given(jacobi_pairs())
@settings(max_examples=30)
def test_dictionary(JP):
    rep = equivalence_check(JP, "s")
    assert rep.consistent
    assert dehomogenize(rep.poisson, "s") == JP
    P, Z = rep.poisson.bivector, rep.poisson.homogeneity
    assert schouten(Z, P) == -P
    assert homogeneity_defect(rep.poisson)[1].is_zero
