"""Command-line driver.

Every subcommand reads a JSON problem file (``--in``), runs its checks and
prints a report: plain text by default, JSON with ``--json``. Exit codes:

0  every check passed
1  a mathematical check failed
2  the input is invalid (unreadable file, bad expression, variable collision,
   coefficient leakage, parity mismatch, point off the transversal, a
   submanifold that is not transversal)

Reports are deterministic apart from the final ``time:`` line (text) or the
``elapsed_s`` field (JSON). File formats are described in ``docs/formats.md``.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .cartan import Multivector, dL
from .expr import Chart, ExprError, PoleError
from .homog import HomogeneityError, HomogeneousPoisson, dehomogenize, homogeneity_defect, homogenize
from .io import (InputError, dump_chart, dump_json, dump_tensor, load_json, parse_chart,
                 parse_points, parse_rational, parse_tensor)
from .jacobi import JacobiPair, jacobi_defect, sharp_matrix
from .moser import (DeformationFamily, SingularDeformationError, deformed_sharp, flow_invariance_probe,
                    singular_times, transport_defect, verify_moser_derivative)
from .omni import (TransversalSpec, TransversalityError, classify_transversal, homogeneous_poisson_type_check,
                   involutivity_check)
from .split import KINDS, SplitModel, split_check, theta

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


@dataclass
class Check:
    name: str
    passed: bool
    details: list[tuple[str, str]] = field(default_factory=list)


@dataclass
class Report:
    command: str
    source: str
    checks: list[Check] = field(default_factory=list)
    emitted: dict | None = None
    emitted_to: str | None = None
    error: str | None = None
    elapsed: float = 0.0

    def add(self, name: str, passed: bool, *details: tuple[str, Any]) -> Check:
        c = Check(name, bool(passed), [(k, str(v)) for k, v in details])
        self.checks.append(c)
        return c

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_INVALID
        return EXIT_PASS if all(c.passed for c in self.checks) else EXIT_FAIL

    @property
    def verdict(self) -> str:
        return {EXIT_PASS: "PASS", EXIT_FAIL: "FAIL", EXIT_INVALID: "INVALID"}[self.exit_code]

    def text(self) -> str:
        out = [f"command: {self.command}", f"input: {self.source}"]
        for c in self.checks:
            out.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}")
            out += [f"    {k}: {v}" for k, v in c.details]
        if self.error is not None:
            out.append(f"error: {self.error}")
        if self.emitted is not None:
            out.append(f"emitted: {self.emitted_to or '(not written)'}")
            out += [f"    {line}" for line in _describe_document(self.emitted)]
        npass = sum(c.passed for c in self.checks)
        out.append(f"result: {self.verdict} ({npass}/{len(self.checks)} checks passed)")
        out.append(f"exit: {self.exit_code}")
        out.append(f"time: {self.elapsed:.3f} s")
        return "\n".join(out) + "\n"

    def json(self) -> str:
        doc = {
            "command": self.command,
            "input": self.source,
            "checks": [{"name": c.name, "passed": c.passed, "details": [list(d) for d in c.details]}
                       for c in self.checks],
            "error": self.error,
            "emitted": self.emitted,
            "emitted_to": self.emitted_to,
            "result": self.verdict.lower(),
            "exit_code": self.exit_code,
            "elapsed_s": round(self.elapsed, 6),
        }
        return dump_json(doc)


def _describe_document(doc: dict) -> list[str]:
    chart = parse_chart(doc["chart"])
    lines = [f"chart {chart.name}: ({', '.join(chart.vars)})"]
    for group in ("pair", "poisson"):
        for name, T in sorted(doc.get(group, {}).items()):
            lines.append(f"{name} = {parse_tensor(chart, T)}")
    return lines


# -- parsing helpers -------------------------------------------------------------------

def _get(doc: Any, key: str, where: str = "input"):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{where}: missing key {key!r}")
    return doc[key]


def _pair(chart: Chart, doc: Any, where: str = "pair") -> JacobiPair:
    L = parse_tensor(chart, _get(doc, "bivector", where), f"{where}.bivector", "multivector", 2)
    E = parse_tensor(chart, _get(doc, "reeb", where), f"{where}.reeb", "multivector", 1)
    return JacobiPair(L, E)


def _poisson(chart: Chart, doc: Any, where: str = "poisson") -> HomogeneousPoisson:
    P = parse_tensor(chart, _get(doc, "bivector", where), f"{where}.bivector", "multivector", 2)
    Z = parse_tensor(chart, _get(doc, "homogeneity", where), f"{where}.homogeneity", "multivector", 1)
    return HomogeneousPoisson(P, Z)


def _pair_doc(JP: JacobiPair) -> dict:
    return {"chart": dump_chart(JP.chart),
            "pair": {"bivector": dump_tensor(JP.bivector), "reeb": dump_tensor(JP.reeb)}}


def _poisson_doc(HP: HomogeneousPoisson) -> dict:
    return {"chart": dump_chart(HP.chart),
            "poisson": {"bivector": dump_tensor(HP.bivector), "homogeneity": dump_tensor(HP.homogeneity)}}


def _uvar(doc: Any) -> str:
    u = _get(doc, "uvar")
    if not isinstance(u, str) or not u.isidentifier():
        raise InputError(f"uvar must be an identifier, got {u!r}")
    return u


def _fmt_point(point: dict[str, Fraction], vars: Sequence[str]) -> str:
    return "(" + ", ".join(f"{v}={point[v]}" for v in vars) + ")"


def _fmt_matrix(m) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in m) + "]"


# -- subcommands ---------------------------------------------------------------------

def cmd_check_jacobi(doc: Any, args, report: Report) -> None:
    chart = parse_chart(_get(doc, "chart"))
    JP = _pair(chart, _get(doc, "pair"))
    structure, reeb = jacobi_defect(JP)
    report.add("jacobi identity", structure.is_zero and reeb.is_zero,
               ("1/2[L,L] + E^L", structure), ("[E,L]", reeb))
    inv = involutivity_check(JP)
    c = report.add("graph involutive under the Dorfman bracket", inv.involutive,
                   ("pairs of sections checked", inv.checked))
    for a, b, value in inv.failures:
        c.details.append((f"[{a}, {b}]", value))
    report.add("involutivity agrees with the defect", inv.agrees)


def cmd_homogenize(doc: Any, args, report: Report) -> None:
    chart = parse_chart(_get(doc, "chart"))
    JP = _pair(chart, _get(doc, "pair"))
    uvar = _uvar(doc)
    if uvar in chart.symbols:
        raise InputError(f"variable collision: {uvar!r} is already a symbol of the chart")
    HP = homogenize(JP, uvar)
    out = _poisson_doc(HP)
    out["uvar"] = uvar
    _emit(report, out, args.out)
    P2, ZP = homogeneity_defect(HP)
    report.add("homogeneous Poisson", P2.is_zero and ZP.is_zero, ("[pi,pi]", P2), ("[Z,pi] + pi", ZP))


def cmd_dehomogenize(doc: Any, args, report: Report) -> None:
    chart = parse_chart(_get(doc, "chart"))
    HP = _poisson(chart, _get(doc, "poisson"))
    uvar = _uvar(doc)
    if uvar not in chart.vars:
        raise InputError(f"{uvar!r} is not a coordinate of the chart")
    P2, ZP = homogeneity_defect(HP)
    report.add("homogeneous Poisson", P2.is_zero and ZP.is_zero, ("[pi,pi]", P2), ("[Z,pi] + pi", ZP))
    try:
        JP = dehomogenize(HP, uvar)
    except HomogeneityError as exc:
        report.add("extraction of (L, E)", False, ("reason", exc))
        return
    report.add("extraction of (L, E)", True)
    _emit(report, _pair_doc(JP), args.out)
    structure, reeb = jacobi_defect(JP)
    report.add("jacobi identity", structure.is_zero and reeb.is_zero,
               ("1/2[L,L] + E^L", structure), ("[E,L]", reeb))


def cmd_split(doc: Any, args, report: Report) -> None:
    kind = _get(doc, "kind")
    if kind not in KINDS:
        raise InputError(f"kind must be one of {', '.join(KINDS)}")
    k = _get(doc, "k")
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise InputError("k must be a positive integer")
    bivector = vector = None
    tdoc = doc.get("transversal")
    if tdoc is not None:
        chart = parse_chart(_get(tdoc, "chart", "transversal"), "transversal.chart")
        if "bivector" in tdoc:
            bivector = parse_tensor(chart, tdoc["bivector"], "transversal.bivector", "multivector", 2)
        if "vector" in tdoc:
            vector = parse_tensor(chart, tdoc["vector"], "transversal.vector", "multivector", 1)
        if bivector is None and vector is None:
            bivector = Multivector.zero(chart, 2)
    model = SplitModel(kind, k)
    if "fiber_dim" in doc:
        declared = doc["fiber_dim"]
        if not isinstance(declared, int) or isinstance(declared, bool):
            raise InputError("fiber_dim must be an integer")
        model.check_fiber_dim(declared)
    rep = split_check(kind, bivector, vector, k)
    labels = ("1/2[L,L] + E^L", "[E,L]") if kind == "cosymplectic" else ("[pi,pi]", "[Z,pi] + pi")
    report.add("transversal data", rep.input_ok, *zip(labels, rep.input_defect))
    out_labels = ("[pi,pi]", "[Z,pi] + pi") if kind.startswith("homogeneous") else ("1/2[L,L] + E^L", "[E,L]")
    report.add("assembled model", rep.output_ok, *zip(out_labels, rep.output_defect))
    report.add("model and transversal data agree", rep.consistent)
    _emit(report, _poisson_doc(rep.model) if isinstance(rep.model, HomogeneousPoisson) else _pair_doc(rep.model),
          args.out)


def _points(doc: Any, chart: Chart, args) -> list[dict[str, Fraction]]:
    if args.points:
        pdoc = load_json(args.points)
        if isinstance(pdoc, dict):
            pdoc = _get(pdoc, "points", args.points)
        return parse_points(chart, pdoc, "points file")
    return parse_points(chart, _get(doc, "points"))


def cmd_dirac(doc: Any, args, report: Report) -> None:
    chart = parse_chart(_get(doc, "chart"))
    JP = _pair(chart, _get(doc, "pair"))
    tdoc = _get(doc, "transversal")
    normal = _get(tdoc, "normal_vars", "transversal")
    if not isinstance(normal, list) or not all(isinstance(v, str) for v in normal):
        raise InputError("transversal.normal_vars must be a list of names")
    spec = TransversalSpec(chart, tuple(normal))
    points = _points(doc, chart, args)
    for pt in points:
        spec.check_point(pt)
    for pt in points:
        where = _fmt_point(pt, chart.vars)
        try:
            cls = classify_transversal(JP, spec, pt)
        except TransversalityError as exc:
            raise InputError(f"at {where}: {exc} (needed {exc.needed})") from None
        B = cls.pulled_back
        hp = homogeneous_poisson_type_check(B)
        summary = f"{cls.kind}, rank {cls.intersection_rank}"
        details = [("transversal rank", f"{cls.transversal_rank} of {chart.dim + 1}"),
                   ("pulled-back dimension", B.dim),
                   ("generator", hp.describe(spec.tangent_vars))]
        if cls.kind == "cosymplectic":
            th = theta(JP, spec, pt)
            good = th.is_nondegenerate()
            summary += ", Theta " + ("nondegenerate" if good else "degenerate")
            details.append((f"Theta in ({', '.join(spec.normal_vars)})", _fmt_matrix(th.matrix)))
        report.add(f"transversal at {where}: {summary}", cls.kind != "neither", *details)
        report.add(f"pulled-back subspace is Lagrangian at {where}", B.is_lagrangian())
        report.add(f"homogeneous Poisson type matches at {where}", hp.is_type == (cls.kind == "cocontact"),
                   ("rank of intersection with derivations", hp.rank))
        if cls.kind == "cosymplectic":
            report.add(f"Theta antisymmetric and nondegenerate at {where}",
                       th.is_antisymmetric() and th.is_nondegenerate())


def cmd_moser(doc: Any, args, report: Report) -> None:
    chart = parse_chart(_get(doc, "chart"))
    JP = _pair(chart, _get(doc, "pair"))
    fam = _get(doc, "family")
    tvar = fam.get("param", "t") if isinstance(fam, dict) else "t"
    if not isinstance(tvar, str) or tvar in chart.symbols:
        raise InputError(f"family parameter {tvar!r} collides with the chart")
    fchart = chart.with_params(tvar)
    sigma = parse_tensor(fchart, _get(fam, "sigma", "family"), "family.sigma", "lform", 2)
    if not sigma.restrict({tvar: 0}).is_zero:
        raise InputError("the family must vanish at t = 0")
    closed = dL(sigma)
    report.add("family is dL-closed", closed.is_zero, ("dL sigma", closed))
    if not closed.is_zero:
        return
    D = DeformationFamily(JP.to_chart(fchart), sigma, tvar)
    points = _points(doc, chart, args)
    t0 = parse_rational(doc.get("t0", "1/2"), "t0")
    h = parse_rational(doc.get("h", "1/64"), "h")
    if h <= 0:
        raise InputError("h must be positive")
    steps = args.steps if args.steps is not None else doc.get("steps")
    if steps is not None and (not isinstance(steps, int) or isinstance(steps, bool) or steps < 1):
        raise InputError("steps must be a positive integer")
    tol = args.tol if args.tol is not None else float(doc.get("tol", 1e-6))

    healthy = []
    for pt in points:
        where = _fmt_point(pt, chart.vars)
        roots = singular_times(D, pt)
        if roots:
            report.add(f"nonsingular for t in [0, 1] at {where}", False,
                       ("singular at", ", ".join(f"t = {r}" for r in roots)), ("point", where))
        else:
            report.add(f"nonsingular for t in [0, 1] at {where}", True)
            healthy.append(pt)
    if len(healthy) < len(points):
        return

    if not transport_defect(D).is_zero:
        report.add("transport equation d/dt J_t + Lie_Delta J_t = 0", False, ("defect", transport_defect(D)))
    else:
        report.add("transport equation d/dt J_t + Lie_Delta J_t = 0", True)
    for pt in points:
        where = _fmt_point(pt, chart.vars)
        base_sharp = sharp_matrix(JP, pt)
        report.add(f"J_0 equals J at {where}", deformed_sharp(D, 0, pt) == base_sharp)
        r1 = verify_moser_derivative(D, t0, pt, h)
        r2 = verify_moser_derivative(D, t0, pt, h / 2)
        report.add(f"derivative identity exact in t at {where}", r1.exact_identity)
        ratio = r1.fd_deviation / r2.fd_deviation if r2.fd_deviation > 0 else float("inf")
        converges = r1.fd_deviation < 1e-12 or ratio > 3.0
        report.add(f"finite-difference check at t0 = {t0} at {where}", converges,
                   (f"deviation h = {h}", f"{r1.fd_deviation:.3e}"),
                   (f"deviation h = {h / 2}", f"{r2.fd_deviation:.3e}"),
                   ("ratio", "exact" if r1.fd_deviation < 1e-12 else f"{ratio:.2f}"))
    if steps is None:
        return
    tables = []
    for pt in points:
        where = _fmt_point(pt, chart.vars)
        try:
            flow = flow_invariance_probe(D, pt, steps)
        except SingularDeformationError as exc:
            report.add(f"flow invariance at {where}", False, ("error", exc))
            continue
        tables.append(flow.table)
        report.add(f"flow invariance at {where}", flow.drift < tol,
                   ("steps", steps), ("max drift", f"{flow.drift:.3e}"), ("tolerance", f"{tol:g}"))
    if args.out and tables:
        rows = [(t, max(tab[i][1] for tab in tables)) for i, (t, _) in enumerate(tables[0])]
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("t,drift\n")
            fh.writelines(f"{t:.6f},{d:.6e}\n" for t, d in rows)
        report.emitted_to = args.out


def _emit(report: Report, doc: dict, path: str | None) -> None:
    report.emitted = doc
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dump_json(doc))
        report.emitted_to = path


COMMANDS: dict[str, tuple[Callable, str]] = {
    "check-jacobi": (cmd_check_jacobi, "check the Jacobi identity and involutivity of the graph"),
    "homogenize": (cmd_homogenize, "build the homogeneous Poisson structure of a Jacobi pair"),
    "dehomogenize": (cmd_dehomogenize, "recover a Jacobi pair from (pi, u d_u)"),
    "split": (cmd_split, "assemble a normal-form model from transversal data"),
    "dirac": (cmd_dirac, "classify a transversal through the pulled-back Dirac structure"),
    "moser": (cmd_moser, "check a closed deformation and its Moser flow"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jacobigeom", description="Exact checks for Jacobi structures.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext, description=helptext)
        p.add_argument("--in", dest="input", required=True, metavar="FILE", help="JSON problem file")
        p.add_argument("--json", action="store_true", help="print a machine-readable report")
        if name in ("homogenize", "dehomogenize", "split", "moser"):
            p.add_argument("--out", metavar="FILE",
                           help="CSV drift table" if name == "moser" else "write the emitted JSON file")
        else:
            p.set_defaults(out=None)
        if name in ("dirac", "moser"):
            p.add_argument("--points", metavar="FILE", help="JSON list of evaluation points")
        else:
            p.set_defaults(points=None)
        if name == "moser":
            p.add_argument("--steps", type=int, metavar="N", help="RK4 steps for the flow probe")
            p.add_argument("--tol", type=float, metavar="R", help="drift tolerance (default 1e-6)")
    return parser


def run(argv: Sequence[str] | None = None) -> Report:
    args = build_parser().parse_args(argv)
    report = Report(args.command, args.input)
    start = time.perf_counter()
    try:
        doc = load_json(args.input)
        if not isinstance(doc, dict):
            raise InputError("the problem file must hold a JSON object")
        COMMANDS[args.command][0](doc, args, report)
    except (InputError, ExprError, PoleError, TransversalityError) as exc:
        report.error = str(exc)
    report.elapsed = time.perf_counter() - start
    return report


def main(argv: Sequence[str] | None = None) -> int:
    report = run(argv)
    argv_list = list(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(report.json() if "--json" in argv_list else report.text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
