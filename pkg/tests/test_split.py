from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from families import homogeneous_poisson_data, jacobi_data, maybe_perturbed
from jacobigeom.cartan import Multivector
from jacobigeom.expr import Chart, ExprError
from jacobigeom.jacobi import JacobiPair
from jacobigeom.omni import TransversalSpec
from jacobigeom.split import (LeakageError, SplitModel, assemble_contact, assemble_cosymplectic,
                              assemble_homogeneous_poisson, canonical_contact_pair, canonical_cosymplectic_pair,
                              canonical_euler, contact_candidates, euler_like_check, fiber_vars, in_sharp_image,
                              omega_form, search_contact_readings, split_check, theta)
from strategies import polys

CANONICAL = "(+p d_u + d_q) ^ d_p"


@pytest.mark.parametrize("k", [1, 2])
def test_contact_reading_search(k):
    search = search_contact_readings(k)
    assert len(contact_candidates(k)) == 4
    # the two d_q readings collapse to +-p d_u ^ d_q, which is Jacobi but degenerate
    assert search.jacobi_readings == [CANONICAL, "(+p d_u + d_q) ^ d_q", "(-p d_u + d_q) ^ d_q"]
    assert search.contact_readings == [CANONICAL]


def test_canonical_pairs():
    C = canonical_contact_pair(1)
    assert C.chart.vars == ("u", "q", "p")
    assert C.bivector == Multivector.from_terms(C.chart, 2, [(("u", "p"), "p"), (("q", "p"), "1")])
    assert C.reeb == Multivector.basis(C.chart, "u")
    K = canonical_contact_pair(2)
    assert K.is_jacobi() and K.chart.vars == ("u", "q1", "p1", "q2", "p2")
    cos = canonical_cosymplectic_pair(2)
    assert cos.is_jacobi() and cos.reeb.is_zero
    qp = Chart("c", ("q", "p"))
    assert canonical_euler(1) == Multivector.vector(qp, {"p": qp.var("p")})


def test_models_without_transversal_data():
    assert assemble_contact(None, None, 1) == canonical_contact_pair(1)
    hp = assemble_homogeneous_poisson(None, None, 1, "i")
    ch = hp.chart
    assert hp.bivector == Multivector.from_terms(ch, 2, [(("p", "q"), "1")])
    assert hp.homogeneity == Multivector.vector(ch, {"p": ch.parse("p + 1")})
    assert hp.is_homogeneous_poisson()
    hp2 = assemble_homogeneous_poisson(None, None, 2, "ii")
    assert hp2.homogeneity == Multivector.vector(hp2.chart, {"p1": hp2.chart.var("p1"), "p2": hp2.chart.var("p2")})
    assert hp2.is_homogeneous_poisson()


def test_display_orderings_matter():
    """Swapping the wedge order in the E-term breaks the cosymplectic model."""
    N = Chart("N", ("x", "y", "z"))
    L = Multivector.from_terms(N, 2, [(("x", "z"), "z"), (("y", "z"), "1")])
    E = Multivector.basis(N, "x")
    good = assemble_cosymplectic(L, E, 1)
    assert good.is_jacobi()
    ch = good.chart
    Z = Multivector.vector(ch, {"p": ch.var("p")})
    Elift = Multivector.basis(ch, "x")
    swapped = JacobiPair(good.bivector - (Elift ^ Z) + (Z ^ Elift), good.reeb)
    assert not swapped.is_jacobi()


def test_leakage_and_fiber_checks():
    N = Chart("N", ("y", "z", "q"))
    leaky = Multivector.from_terms(N, 2, [(("y", "z"), "q")])
    with pytest.raises(LeakageError):
        assemble_cosymplectic(leaky, None, 1)
    pointing = Multivector.basis(N, "q")
    with pytest.raises(LeakageError):
        assemble_contact(None, pointing, 1)
    m = SplitModel("contact", 1)
    with pytest.raises(ExprError):
        m.check_fiber_dim(2)
    with pytest.raises(ExprError):
        m.check_fiber_dim(5)
    m.check_fiber_dim(3)
    assert fiber_vars(2, contact=True) == ("u", "q1", "p1", "q2", "p2")


@given(maybe_perturbed(jacobi_data()), st.integers(1, 2))
@settings(max_examples=20)
def test_cosymplectic_equivalence(data, k):
    assert split_check("cosymplectic", *data, k).consistent


@given(maybe_perturbed(homogeneous_poisson_data()), st.integers(1, 2),
       st.sampled_from(["contact", "homogeneous_poisson_case_i", "homogeneous_poisson_case_ii"]))
@settings(max_examples=30)
def test_homogeneous_kinds_equivalence(data, k, kind):
    assert split_check(kind, *data, k).consistent


@pytest.mark.parametrize("k", [1, 2])
def test_theta_is_standard(k):
    N = Chart("N", ("y",))
    JP = assemble_cosymplectic(Multivector.zero(N, 2), None, k)
    fv = fiber_vars(k)
    normal = fv[0::2] + fv[1::2]
    th = theta(JP, TransversalSpec(JP.chart, normal), {v: 0 for v in JP.chart.vars})
    J = [[Fraction(0)] * 2 * k for _ in range(2 * k)]
    for i in range(k):
        J[i][k + i], J[k + i][i] = Fraction(1), Fraction(-1)
    assert [list(r) for r in th.matrix] == J
    assert th.is_antisymmetric() and th.is_nondegenerate()


def _normal_spec(n):
    names = ("a", "b", "c", "d")[:n]
    chart = Chart("E", names)
    return chart, TransversalSpec(chart, names[: n - 1])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_euler_like(n):
    chart, spec = _normal_spec(n)
    normal = spec.normal_vars
    euler = Multivector.vector(chart, {v: chart.var(v) for v in normal})
    assert euler_like_check(euler, spec).euler_like
    assert not euler_like_check(euler * 2, spec).euler_like
    quadratic = Multivector.vector(chart, {v: chart.var(v) ** 2 for v in normal})
    assert not euler_like_check(quadratic, spec).euler_like
    with pytest.raises(ExprError):
        euler_like_check(euler + Multivector.basis(chart, normal[0]), spec)


@given(st.integers(2, 4), st.data())
@settings(max_examples=20)
def test_euler_like_ignores_second_order_terms(n, data):
    chart, spec = _normal_spec(n)
    normal = spec.normal_vars
    euler = Multivector.vector(chart, {v: chart.var(v) for v in normal})
    comps = {}
    for v in chart.vars:
        a, b = data.draw(st.sampled_from(normal)), data.draw(st.sampled_from(normal))
        comps[v] = chart.var(a) * chart.var(b) * data.draw(polys(chart, max_deg=1))
    X = euler + Multivector.vector(chart, comps)
    assert euler_like_check(X, spec).euler_like


def test_omega_and_sharp_image():
    C = Chart("c", ("q", "p"))
    w = omega_form(C)
    assert str(w) == "(1)*dq^dp + 1*^((-p)*dq)"
    P = Multivector.from_terms(C, 2, [(("q", "p"), "1")])
    assert in_sharp_image(P, Multivector.basis(C, "q"), {"q": 0, "p": 0})
    assert not in_sharp_image(Multivector.zero(C, 2), Multivector.basis(C, "q"), {"q": 0, "p": 0})
