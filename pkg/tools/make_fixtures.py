"""Regenerate the JSON fixtures under fixtures/ (run from the repository root)."""
from __future__ import annotations

import json
from pathlib import Path

from jacobigeom.cartan import DiffForm, LForm, Multivector, dL
from jacobigeom.expr import Chart
from jacobigeom.io import dump_chart, dump_json, dump_tensor

OUT = Path("fixtures")


def write(name: str, doc: dict) -> None:
    (OUT / name).write_text(dump_json(doc), encoding="utf-8")


def mv(chart, degree, terms):
    return dump_tensor(Multivector.from_terms(chart, degree, terms))


def pair(chart, biv, reeb):
    return {"bivector": mv(chart, 2, biv), "reeb": mv(chart, 1, reeb)}


C3 = Chart("contact3", ("u", "q", "p"))
CONTACT = pair(C3, [(("u", "p"), "p"), (("q", "p"), "1")], [(("u",), "1")])
PERTURBED = pair(C3, [(("u", "p"), "p"), (("q", "p"), "1"), (("u", "q"), "q")], [(("u",), "1")])
ZERO = pair(C3, [], [])
R4 = Chart("R4", ("q1", "p1", "q2", "p2"))
COSYMP = pair(R4, [(("q1", "p1"), "1"), (("q2", "p2"), "1")], [])


def main() -> None:
    OUT.mkdir(exist_ok=True)
    c3 = dump_chart(C3)
    write("zero_pair.json", {"chart": c3, "pair": ZERO})
    write("contact_pair.json", {"chart": c3, "pair": CONTACT})
    write("perturbed_pair.json", {"chart": c3, "pair": PERTURBED})
    write("cosymplectic_r4.json", {"chart": dump_chart(R4), "pair": COSYMP})

    write("homogenize_zero.json", {"chart": c3, "pair": ZERO, "uvar": "s"})
    write("homogenize_contact.json", {"chart": c3, "pair": CONTACT, "uvar": "s"})
    write("homogenize_perturbed.json", {"chart": c3, "pair": PERTURBED, "uvar": "s"})
    write("homogenize_collision.json", {"chart": c3, "pair": CONTACT, "uvar": "q"})

    H = Chart("contact3", ("s", "u", "q", "p"))
    write("dehomogenize_bad_homogeneity.json", {
        "chart": dump_chart(H), "uvar": "s",
        "poisson": {"bivector": mv(H, 2, [(("q", "p"), "1/s")]),
                    "homogeneity": mv(H, 1, [(("s",), "2*s")])}})

    write("split_contact_k1.json", {"kind": "contact", "k": 1})
    write("split_contact_k2.json", {
        "kind": "contact", "k": 2, "fiber_dim": 5,
        "transversal": {"chart": {"name": "N", "vars": ["y", "z"]},
                        "bivector": mv(Chart("N", ("y", "z")), 2, [(("y", "z"), "y")]),
                        "vector": mv(Chart("N", ("y", "z")), 1, [(("z",), "z")])}})
    N3 = Chart("N", ("x", "y", "z"))
    write("split_cosymplectic_fail.json", {
        "kind": "cosymplectic", "k": 1,
        "transversal": {"chart": dump_chart(N3), "bivector": mv(N3, 2, [(("x", "y"), "1")]),
                        "vector": mv(N3, 1, [(("z",), "x")])}})
    write("split_cosymplectic_pass.json", {
        "kind": "cosymplectic", "k": 1, "fiber_dim": 2,
        "transversal": {"chart": dump_chart(N3),
                        "bivector": mv(N3, 2, [(("x", "z"), "z"), (("y", "z"), "1")]),
                        "vector": mv(N3, 1, [(("x",), "1")])}})
    write("split_hp_case_i.json", {"kind": "homogeneous_poisson_case_i", "k": 1})
    NL = Chart("N", ("y", "z", "q"))
    write("split_leakage.json", {
        "kind": "cosymplectic", "k": 1,
        "transversal": {"chart": dump_chart(NL), "bivector": mv(NL, 2, [(("y", "z"), "q")])}})
    write("split_parity.json", {"kind": "contact", "k": 1, "fiber_dim": 2})

    write("dirac_cosymplectic.json", {
        "chart": dump_chart(R4), "pair": COSYMP, "transversal": {"normal_vars": ["q1", "p1"]},
        "points": [{"q1": 0, "p1": 0, "q2": 0, "p2": 0}, {"q1": 0, "p1": 0, "q2": "1/2", "p2": -1}]})
    write("dirac_contact.json", {
        "chart": c3, "pair": CONTACT, "transversal": {"normal_vars": ["u"]},
        "points": [{"u": 0, "q": 0, "p": 0}, {"u": 0, "q": 1, "p": "1/2"}]})
    write("dirac_contact_points.json", {"points": [{"u": 0, "q": "-2", "p": "3/5"}]})
    write("dirac_nontransversal.json", {
        "chart": c3, "pair": ZERO, "transversal": {"normal_vars": ["u"]},
        "points": [{"u": 0, "q": 0, "p": 0}]})
    write("dirac_off_transversal.json", {
        "chart": c3, "pair": CONTACT, "transversal": {"normal_vars": ["u"]},
        "points": [{"u": 1, "q": 0, "p": 0}]})

    R2 = Chart("R2", ("q", "p"))
    R2t = R2.with_params("t")
    planar = pair(R2, [(("q", "p"), "1")], [])
    beta = LForm(DiffForm.from_terms(R2t, 1, [(("q",), "p^2"), (("p",), "q")]))
    sigma = dL(beta) * R2t.parse("t/2")
    omega = LForm(DiffForm.from_terms(R2t, 2, [(("q", "p"), "1")]),
                  DiffForm.from_terms(R2t, 1, [(("q",), "-p")]))
    base = {"chart": dump_chart(R2), "pair": planar, "t0": "1/2", "h": "1/64"}
    write("moser_r2.json", {**base, "family": {"param": "t", "sigma": dump_tensor(sigma)},
                            "points": [{"q": "1/2", "p": "1/3"}], "steps": 1000})
    write("moser_zero.json", {**base, "family": {"param": "t", "sigma": dump_tensor(LForm.zero(R2t, 2))},
                              "points": [{"q": 0, "p": 0}, {"q": "1/2", "p": "1/3"}], "steps": 100})
    write("moser_singular.json", {**base, "family": {"param": "t", "sigma": dump_tensor(omega * R2t.parse("2*t"))},
                                  "points": [{"q": 0, "p": 0}], "steps": 100})
    pole = dL(LForm(DiffForm.from_terms(R2t, 1, [(("p",), "q^2")]))) * R2t.parse("t")
    write("moser_pole.json", {**base, "family": {"param": "t", "sigma": dump_tensor(pole)},
                              "points": [{"q": "1/3", "p": 0}], "steps": 200})
    write("moser_not_closed.json", {**base, "family": {"param": "t", "sigma": {
        "kind": "lform", "degree": 2, "plain": [[["q", "p"], "t"]], "jet": []}},
        "points": [{"q": 0, "p": 0}]})


if __name__ == "__main__":
    main()
