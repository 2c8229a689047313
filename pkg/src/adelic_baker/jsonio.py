"""JSON wire formats (schema tag "adelic-baker/1").

Instance files:
    {"format": "adelic-baker/1", "field": "x^2+1", "alpha": ["2", "3"],
     "u": {"kind": "arch", "branches": [0, 0]} | {"kind": "padic", "p": 5},
     "beta": [["0", "1", "0"], ...], "v0": "inf0" | "5.0",
     "declared_s": 1, "declared_I": [1], "kind": "principal"}

Bundle files:
    {"format": "adelic-baker/1", "field": "x", "dim": 2,
     "deviations": [{"place": "inf0", "matrix": [["1/2","0"],["0","2"]]}]}

Rational scalars are strings or ints; matrices are row-major.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .bundles import AdelicBundle
from .errors import AdelicError
from .fields import NumberField, parse_element, parse_field
from .linforms import LinFormInstance
from .places import FINITE, Place, arch_places, places_above

FORMAT = "adelic-baker/1"


def _check_format(doc: dict):
    if doc.get("format") != FORMAT:
        raise AdelicError(f'expected "format": "{FORMAT}"')


def parse_place(field: NumberField, key: str) -> Place:
    key = str(key)
    if key.startswith("inf"):
        idx = int(key[3:] or 0)
        places = arch_places(field)
        if idx >= len(places):
            raise AdelicError(f"no archimedean place {key}")
        return places[idx]
    if "." in key:
        p_s, idx_s = key.split(".", 1)
        p, idx = int(p_s), int(idx_s)
    else:
        p, idx = int(key), 0
    places = places_above(field, p)
    if idx >= len(places):
        raise AdelicError(f"no place {key} above {p}")
    return places[idx]


def _element(field: NumberField, value):
    if isinstance(value, str):
        return parse_element(field, value)
    if isinstance(value, list):
        return field.element([Fraction(str(v)) for v in value])
    return field.element(Fraction(value))


def load_instance(doc) -> tuple:
    """Returns (LinFormInstance, kind)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    _check_format(doc)
    field = parse_field(doc["field"])
    u = doc["u"]
    alpha = [_element(field, a) for a in doc["alpha"]]
    beta = [[_element(field, b) for b in row] for row in doc["beta"]]
    if u["kind"] == "arch":
        v0 = parse_place(field, doc.get("v0", "inf0"))
        branches = tuple(u.get("branches") or [0] * len(alpha))
    elif u["kind"] == "padic":
        default = f"{u['p']}.0"
        v0 = parse_place(field, doc.get("v0", default))
        if v0.kind != FINITE or v0.p != u["p"]:
            raise AdelicError("v0 must lie above the declared p")
        branches = ()
    else:
        raise AdelicError("u.kind must be 'arch' or 'padic'")
    inst = LinFormInstance(
        field=field, alpha=alpha, u_kind=u["kind"], branches=branches,
        beta=beta, v0=v0,
        declared_s=doc.get("declared_s"),
        declared_I=tuple(doc["declared_I"]) if doc.get("declared_I") else None,
    )
    return inst, doc.get("kind", "principal")


def load_bundle(doc) -> AdelicBundle:
    if isinstance(doc, str):
        doc = json.loads(doc)
    _check_format(doc)
    field = parse_field(doc["field"])
    deviations = {}
    for item in doc.get("deviations", []):
        place = parse_place(field, item["place"])
        rows = [[_element(field, e) for e in row] for row in item["matrix"]]
        deviations[place] = rows
    return AdelicBundle(field, int(doc["dim"]), deviations)


def load_matrix(doc) -> list:
    """Rational or decimal-string matrix entries; decimals become Fractions
    exactly (they are decimal literals, not floats)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    rows = doc["matrix"] if isinstance(doc, dict) else doc
    return [[Fraction(str(e)) for e in row] for row in rows]


def dump_report(report, prec: int = 120) -> dict:
    """Machine-readable verification report."""
    from .places import PPower

    lam = []
    for v in report.lambda_abs:
        if isinstance(v, PPower):
            lam.append({"exact_p_power": [v.p, str(v.exponent)] if not v.is_zero else None})
        else:
            lam.append({"value": v.str_decimal(25), "radius": float(v.rad)})
    return {
        "format": FORMAT,
        "lambda_abs": lam,
        "max_log_lambda": report.max_log_lambda.str_decimal(25),
        "bound": {
            "sign": "-",
            "log_magnitude": report.bound.log_magnitude(prec).str_decimal(25),
            "constant": f"({report.bound.const_base})^{report.bound.const_exponent}",
            "branch": report.bound.branch,
        },
        "margin_log10": report.margin.decimal_log10(prec),
        "pass": report.passed,
        "hypothesis_status": report.hypothesis_status,
        "s": report.s,
        "I": list(report.I),
        "u_domain_ok": report.u_domain_ok,
    }
