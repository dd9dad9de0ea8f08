"""JSON encoding of charts, tensors and points.

Tensor objects::

    {"kind": "multivector" | "form", "degree": k,
     "coeffs": [[["q", "p"], "1/u"], ...]}
    {"kind": "lform", "degree": k, "plain": [...], "jet": [...]}

Each coefficient entry pairs a list of coordinate names (any order; the
sign of the sorting permutation is applied, repeated entries add up) with an
expression string. Charts are ``{"name": ..., "vars": [...], "params": [...]}``
and points map coordinate names to rationals written as integers or strings
such as ``"-3/4"``.

The dump functions emit the canonical form: index names in chart order,
entries sorted by index tuple, coefficients printed canonically.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from .cartan import DiffForm, LForm, Multivector
from .expr import Chart, ExprError, ParseError, PoleError

__all__ = [
    "InputError",
    "load_json",
    "parse_chart",
    "dump_chart",
    "parse_tensor",
    "dump_tensor",
    "parse_rational",
    "parse_point",
    "parse_points",
    "dump_json",
]


class InputError(ValueError):
    """Malformed or inconsistent input (exit code 2 on the command line)."""


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _require(doc: Mapping, key: str, where: str):
    if not isinstance(doc, Mapping) or key not in doc:
        raise InputError(f"{where}: missing key {key!r}")
    return doc[key]


def parse_chart(doc: Any, where: str = "chart") -> Chart:
    if not isinstance(doc, Mapping):
        raise InputError(f"{where}: expected an object")
    vars_ = _require(doc, "vars", where)
    params = doc.get("params", [])
    if not isinstance(vars_, list) or not all(isinstance(v, str) for v in vars_):
        raise InputError(f"{where}: 'vars' must be a list of names")
    if not isinstance(params, list) or not all(isinstance(v, str) for v in params):
        raise InputError(f"{where}: 'params' must be a list of names")
    try:
        return Chart(str(doc.get("name", "chart")), tuple(vars_), tuple(params))
    except ExprError as exc:
        raise InputError(f"{where}: {exc}") from None


def dump_chart(chart: Chart) -> dict:
    out: dict = {"name": chart.name, "vars": list(chart.vars)}
    if chart.params:
        out["params"] = list(chart.params)
    return out


def _parse_terms(chart: Chart, entries: Any, degree: int, cls, where: str):
    if not isinstance(entries, list):
        raise InputError(f"{where}: coefficients must be a list")
    terms = []
    for k, entry in enumerate(entries):
        if (not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], list)
                or not isinstance(entry[1], (str, int))):
            raise InputError(f"{where}[{k}]: expected [[index names...], \"expression\"]")
        terms.append((entry[0], str(entry[1])))
    try:
        return cls.from_terms(chart, degree, terms)
    except ParseError as exc:
        raise InputError(f"{where}: {exc}") from None
    except (ExprError, PoleError) as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_tensor(chart: Chart, doc: Any, where: str = "tensor", kind: str | None = None,
                 degree: int | None = None):
    if not isinstance(doc, Mapping):
        raise InputError(f"{where}: expected an object")
    k = _require(doc, "kind", where)
    deg = _require(doc, "degree", where)
    if not isinstance(deg, int) or isinstance(deg, bool):
        raise InputError(f"{where}: degree must be an integer")
    if kind is not None and k != kind:
        raise InputError(f"{where}: expected a {kind}, got {k!r}")
    if degree is not None and deg != degree:
        raise InputError(f"{where}: expected degree {degree}, got {deg}")
    if deg < 0 or deg > chart.dim + (1 if k == "lform" else 0):
        raise InputError(f"{where}: degree {deg} out of range on a chart of dimension {chart.dim}")
    if k == "multivector":
        return _parse_terms(chart, doc.get("coeffs", []), deg, Multivector, where)
    if k == "form":
        return _parse_terms(chart, doc.get("coeffs", []), deg, DiffForm, where)
    if k == "lform":
        plain = _parse_terms(chart, doc.get("plain", []), deg, DiffForm, where + ".plain") \
            if deg <= chart.dim else DiffForm.zero(chart, deg)
        jet = _parse_terms(chart, doc.get("jet", []), deg - 1, DiffForm, where + ".jet")
        return LForm(plain, jet)
    raise InputError(f"{where}: unknown tensor kind {k!r}")


def _dump_terms(T) -> list:
    return [[list(names), str(c)] for names, c in T.terms()]


def dump_tensor(T) -> dict:
    if isinstance(T, LForm):
        return {"kind": "lform", "degree": T.degree, "plain": _dump_terms(T.plain), "jet": _dump_terms(T.jet)}
    return {"kind": T.kind, "degree": T.degree, "coeffs": _dump_terms(T)}


def parse_rational(x: Any, where: str = "value") -> Fraction:
    if isinstance(x, bool):
        raise InputError(f"{where}: expected a rational number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"{where}: {x!r} is not a rational number") from None
    if isinstance(x, float):
        return Fraction(str(x))
    raise InputError(f"{where}: expected a rational number")


def parse_point(chart: Chart, doc: Any, where: str = "point") -> dict[str, Fraction]:
    if not isinstance(doc, Mapping):
        raise InputError(f"{where}: expected an object mapping coordinates to values")
    out = {}
    for k, v in doc.items():
        if k not in chart.vars:
            raise InputError(f"{where}: {k!r} is not a coordinate of the chart")
        out[k] = parse_rational(v, f"{where}.{k}")
    missing = [v for v in chart.vars if v not in out]
    if missing:
        raise InputError(f"{where}: no value for {missing}")
    return out


def parse_points(chart: Chart, doc: Any, where: str = "points") -> list[dict[str, Fraction]]:
    if not isinstance(doc, list) or not doc:
        raise InputError(f"{where}: expected a non-empty list of points")
    return [parse_point(chart, p, f"{where}[{i}]") for i, p in enumerate(doc)]
