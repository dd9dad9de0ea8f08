from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

import oracles
from jacobigeom.cartan import DiffForm, LForm, Multivector, dL
from jacobigeom.expr import Chart, ExprError
from jacobigeom.jacobi import JacobiPair, sharp_matrix
from jacobigeom.moser import (DeformationFamily, SingularDeformationError, deformed_sharp, deformed_sharp_in_t,
                              flat_matrix, flow_invariance_probe, moser_alpha, moser_derivation, singular_times,
                              transport_defect, verify_moser_derivative)
from families import random_families

R2 = Chart("R2", ("q", "p"))
R2T = R2.with_params("t")
PLANAR = JacobiPair(Multivector.from_terms(R2, 2, [(("q", "p"), "1")]), Multivector.zero(R2, 1))
C3T = Chart("c3", ("u", "q", "p"), ("t",))
CONTACT = JacobiPair(Multivector.from_terms(C3T, 2, [(("u", "p"), "p"), (("q", "p"), "1")]),
                     Multivector.basis(C3T, "u"))
OMEGA = LForm(DiffForm.from_terms(R2T, 2, [(("q", "p"), "1")]), DiffForm.from_terms(R2T, 1, [(("q",), "-p")]))


def family(base, sigma):
    return DeformationFamily(base.to_chart(sigma.chart), sigma)


def r2_fixture():
    beta = LForm(DiffForm.from_terms(R2T, 1, [(("q",), "p^2"), (("p",), "q")]))
    return family(PLANAR, dL(beta) * R2T.parse("t/2"))


POINT = {"q": Fraction(1, 2), "p": Fraction(1, 3)}


def test_family_validation():
    with pytest.raises(ExprError, match="not dL-closed"):
        family(PLANAR, LForm(DiffForm.from_terms(R2T, 2, [(("q", "p"), "t")])))
    with pytest.raises(ExprError, match="vanish at t = 0"):
        family(PLANAR, OMEGA)
    with pytest.raises(ExprError):
        DeformationFamily(PLANAR, OMEGA * R2T.parse("t"), tvar="s")


def test_flat_matrix_matches_reference():
    D = r2_fixture()
    xs = oracles.symbols(R2.vars)
    t = sympy.Symbol("t")
    ref = oracles.flat_matrix(oracles.form_matrix(D.sigma.plain, xs, {"t": t}),
                              oracles.form_list(D.sigma.jet, xs, {"t": t}))
    got = sympy.Matrix([[sympy.sympify(str(x).replace("^", "**"), locals={"q": xs[0], "p": xs[1], "t": t})
                         for x in row] for row in flat_matrix(D.sigma)])
    assert (got - ref).applyfunc(sympy.expand) == sympy.zeros(3, 3)


def test_deformed_sharp_matches_reference_inverse():
    D = r2_fixture()
    t0 = Fraction(3, 5)
    xs = oracles.symbols(R2.vars)
    env = {"q": POINT["q"], "p": POINT["p"], "t": t0}
    S = sympy.Matrix([[sympy.Rational(str(x.eval(env))) for x in row] for row in flat_matrix(D.sigma)])
    J = sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in sharp_matrix(PLANAR, POINT)])
    ref = oracles.deformed_sharp(J, S)
    assert sympy.Matrix(deformed_sharp(D, t0, POINT)).applyfunc(lambda x: sympy.Rational(str(x))) == ref


def test_alpha_and_reconstruction():
    D = r2_fixture()
    alpha = moser_alpha(D)
    assert D.sigma.partial("t") == -dL(alpha)
    # alpha = -d/dt i_1 sigma = -(p^2 dq + q dp)/2
    assert alpha == LForm(DiffForm.from_terms(R2T, 1, [(("q",), "-p^2/2"), (("p",), "-q/2")]))


def test_moser_derivation_value():
    D = family(PLANAR, OMEGA * R2T.parse("t"))
    # alpha = p dq; at t = 0 the derivation is J#(p dq) = (p d_p, 0)
    assert moser_derivation(D, 0, {"q": 1, "p": 2}) == [0, 2, 0]


def test_singular_times():
    assert singular_times(family(PLANAR, OMEGA * R2T.parse("2*t")), {"q": 0, "p": 0}) == ["1/2"]
    assert singular_times(family(PLANAR, OMEGA * R2T.parse("2*t")), POINT) == ["1/2"]
    assert singular_times(r2_fixture(), POINT) == []
    assert singular_times(family(PLANAR, LForm.zero(R2T, 2)), POINT) == []


def test_zero_family_is_static():
    D = family(PLANAR, LForm.zero(R2T, 2))
    assert deformed_sharp(D, Fraction(1, 2), POINT) == sharp_matrix(PLANAR, POINT)
    rep = flow_invariance_probe(D, POINT, 50)
    assert rep.drift == 0.0
    assert rep.csv().splitlines()[0] == "t,drift"


def test_r2_fixture_numerics():
    D = r2_fixture()
    r1 = verify_moser_derivative(D, Fraction(1, 2), POINT, Fraction(1, 64))
    r2 = verify_moser_derivative(D, Fraction(1, 2), POINT, Fraction(1, 128))
    assert r1.exact_identity and r2.exact_identity
    assert 3.5 < r1.fd_deviation / r2.fd_deviation < 4.5
    drifts = [flow_invariance_probe(D, POINT, n).drift for n in (10, 20)]
    assert 12 < drifts[0] / drifts[1] < 20


def test_pole_met_along_the_flow():
    beta = LForm(DiffForm.from_terms(R2T, 1, [(("p",), "q^2")]))
    D = family(PLANAR, dL(beta) * R2T.parse("t"))
    start = {"q": Fraction(1, 3), "p": Fraction(0)}
    assert singular_times(D, start) == []
    with pytest.raises(SingularDeformationError):
        flow_invariance_probe(D, start, 200)


def test_transport_equation_on_contact_family():
    beta = LForm(DiffForm.from_terms(C3T, 1, [(("q",), "u"), (("p",), "q^2")]), DiffForm.function(C3T.parse("p")))
    D = family(CONTACT, dL(beta) * C3T.parse("t"))
    assert transport_defect(D).is_zero
    assert transport_defect(r2_fixture()).is_zero


@given(random_families(), st.data())
@settings(max_examples=20)
def test_formal_identity_on_random_families(D, data):
    pt = {v: Fraction(data.draw(st.integers(-2, 2)), 3) for v in D.chart.vars}
    assert deformed_sharp(D, 0, pt) == sharp_matrix(D.base, pt)
    assert verify_moser_derivative(D, Fraction(1, 4), pt, Fraction(1, 64)).exact_identity


def test_symbolic_sharp_at_zero():
    D = r2_fixture()
    Jt = deformed_sharp_in_t(D, POINT)
    assert [[x.restrict({"t": 0}).eval({}) for x in row] for row in Jt] == sharp_matrix(PLANAR, POINT)
