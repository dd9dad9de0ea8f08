from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from families import jacobi_pairs
from jacobigeom.cartan import DiffForm, LForm, Multivector, dL
from jacobigeom.expr import Chart, ExprError
from jacobigeom.jacobi import JacobiPair, JetSection, jacobi_defect, jet_of
from jacobigeom.omni import (OmniFiberSubspace, OmniSection, TransversalSpec, TransversalityError, TwistForm,
                             backwards_transform, bfield, classify_transversal, dl_fiber, dorfman, graph_section,
                             graph_subspace, homogeneous_poisson_type_check, involutivity_check, jet_fiber,
                             pairing)
from strategies import chart_of, derivations, forms, lforms, polys

C3 = Chart("c3", ("u", "q", "p"))
CONTACT = JacobiPair(Multivector.from_terms(C3, 2, [(("u", "p"), "p"), (("q", "p"), "1")]),
                     Multivector.basis(C3, "u"))
R4 = Chart("R4", ("q1", "p1", "q2", "p2"))
COSYMP = JacobiPair(Multivector.from_terms(R4, 2, [(("q1", "p1"), "1"), (("q2", "p2"), "1")]),
                    Multivector.zero(R4, 1))
ORIGIN3 = {"u": 0, "q": 0, "p": 0}
ORIGIN4 = {v: 0 for v in R4.vars}


@st.composite
def sections(draw, chart):
    jet = JetSection(draw(forms(chart, 1)), draw(polys(chart)))
    return OmniSection(draw(derivations(chart)), jet)


@given(st.data())
@settings(max_examples=25)
def test_dorfman_axioms(data):
    chart = chart_of(data.draw(st.integers(1, 3)))
    a, b, c = (data.draw(sections(chart)) for _ in range(3))
    # Leibniz form of the Jacobi identity
    assert dorfman(a, dorfman(b, c)) == dorfman(dorfman(a, b), c) + dorfman(b, dorfman(a, c))
    # invariance of the pairing
    assert a.der(pairing(b, c)) == pairing(dorfman(a, b), c) + pairing(b, dorfman(a, c))
    # the symmetric part is exact
    half = pairing(a, a) * Fraction(1, 2)
    assert dorfman(a, a) == OmniSection(a.der * 0, jet_of(half))


@given(st.data())
@settings(max_examples=25)
def test_bfield(data):
    chart = chart_of(data.draw(st.integers(1, 3)))
    a, b = data.draw(sections(chart)), data.draw(sections(chart))
    B, B2 = data.draw(lforms(chart, 2)), data.draw(lforms(chart, 2))
    assert pairing(bfield(B, a), bfield(B, b)) == pairing(a, b)
    assert bfield(B, bfield(B2, a)) == bfield(B + B2, a)
    closed = dL(data.draw(lforms(chart, 1)))
    assert dorfman(bfield(closed, a), bfield(closed, b)) == bfield(closed, dorfman(a, b))


def test_twist_must_be_closed():
    w = LForm(DiffForm.zero(C3, 3), DiffForm.from_terms(C3, 2, [(("q", "p"), "u")]))
    with pytest.raises(ExprError):
        TwistForm(w)
    H = TwistForm(dL(LForm(DiffForm.from_terms(C3, 2, [(("q", "p"), "u")]))))
    a = graph_section(CONTACT, JetSection.one_star(C3))
    b = graph_section(CONTACT, jet_of(C3.var("q")))
    assert dorfman(a, b, H) != dorfman(a, b)


@given(jacobi_pairs(), st.data())
@settings(max_examples=20)
def test_graph_is_lagrangian(JP, data):
    pt = {v: Fraction(data.draw(st.integers(-3, 3)), data.draw(st.integers(1, 3))) for v in JP.chart.vars}
    G = graph_subspace(JP, pt)
    assert G.dim == JP.chart.dim + 1
    assert G.is_isotropic() and G.is_lagrangian()


def test_fibers():
    assert dl_fiber(C3.vars, ORIGIN3).is_lagrangian()
    assert jet_fiber(C3.vars, ORIGIN3).is_lagrangian()
    assert graph_subspace(JacobiPair.zero(C3), ORIGIN3) == jet_fiber(C3.vars, ORIGIN3)


def test_involutivity_on_fixed_pairs():
    for JP, ok in ((CONTACT, True), (COSYMP, True), (JacobiPair.zero(C3), True),
                   (JacobiPair(CONTACT.bivector + Multivector.from_terms(C3, 2, [(("u", "q"), "q")]), CONTACT.reeb),
                    False)):
        rep = involutivity_check(JP)
        assert rep.involutive is ok
        assert rep.agrees


@given(jacobi_pairs())
@settings(max_examples=15)
def test_involutivity_agrees_with_defect(JP):
    rep = involutivity_check(JP)
    assert rep.agrees
    assert rep.involutive == all(t.is_zero for t in jacobi_defect(JP))


def test_cosymplectic_backwards_transform_is_transversal_graph():
    spec = TransversalSpec(R4, ("q1", "p1"))
    cls = classify_transversal(COSYMP, spec, ORIGIN4)
    assert (cls.kind, cls.intersection_rank) == ("cosymplectic", 0)
    N = Chart("N", ("q2", "p2"))
    inner = JacobiPair(Multivector.from_terms(N, 2, [(("q2", "p2"), "1")]), Multivector.zero(N, 1))
    assert backwards_transform(graph_subspace(COSYMP, ORIGIN4), spec) == graph_subspace(inner, {"q2": 0, "p2": 0})


def test_contact_transversals():
    cocontact = classify_transversal(CONTACT, TransversalSpec(C3, ("u",)), ORIGIN3)
    assert (cocontact.kind, cocontact.intersection_rank) == ("cocontact", 1)
    hp = homogeneous_poisson_type_check(cocontact.pulled_back)
    assert hp.is_type and hp.describe(("q", "p")) == "1"
    elsewhere = classify_transversal(CONTACT, TransversalSpec(C3, ("u",)), {"u": 0, "q": 1, "p": Fraction(1, 2)})
    assert homogeneous_poisson_type_check(elsewhere.pulled_back).describe(("q", "p")) == "1 - 1/2*d_p"
    # the q = p = 0 line through a contact manifold is cosymplectic
    line = classify_transversal(CONTACT, TransversalSpec(C3, ("q", "p")), ORIGIN3)
    assert (line.kind, line.intersection_rank) == ("cosymplectic", 0)


def test_transversality_errors():
    with pytest.raises(TransversalityError):
        classify_transversal(JacobiPair.zero(C3), TransversalSpec(C3, ("u",)), ORIGIN3)
    with pytest.raises(ExprError):
        classify_transversal(CONTACT, TransversalSpec(C3, ("u",)), {"u": 1, "q": 0, "p": 0})
    with pytest.raises(ExprError):
        TransversalSpec(C3, ("u", "q", "p"))


def test_subspace_span_is_canonical():
    a = OmniFiberSubspace.span(("x",), {"x": 0}, [[1, 0, 0, 0], [1, 1, 0, 0]])
    b = OmniFiberSubspace.span(("x",), {"x": 0}, [[0, 2, 0, 0], [3, 0, 0, 0]])
    assert a == b and a.dim == 2
