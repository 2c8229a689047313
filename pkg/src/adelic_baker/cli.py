"""Command-line interface.

Subcommands: places, height, bundle, siegel, bound, params, delta, verify,
selftest.  Exit codes: 0 success, 1 failed verification/selftest, 2 usage
error.  ``--json PATH`` writes the machine report alongside the text output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .acceptance import run_all
from .balls import PrecisionContext
from .bounds import (
    BoundInstance,
    check_param_properties,
    compute_params,
    delta_lcm,
    theorem_bound,
)
from .bundles import AdelicBundle
from .errors import AdelicError
from .fields import parse_element, parse_field
from .heights import weil_height
from .jsonio import FORMAT, dump_report, load_bundle, load_instance, load_matrix, parse_place
from .linforms import derive_bound_instance, verify_instance
from .places import FINITE, enumerate_places
from .siegel import (
    absolute_siegel_witness,
    approx_siegel_search,
    bombieri_vaaler_bound,
    classical_siegel_bound,
    classical_siegel_search,
    absolute_siegel_bound,
)
from .sympower import sym_max_slope_bound


def _write_json(args, payload):
    if getattr(args, "json", None):
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=2)


def _cmd_places(args, ctx):
    field = parse_field(args.field)
    places = enumerate_places(field, args.prime_bound, on_bad="skip" if args.skip_bad else "raise")
    rows = []
    for v in places:
        if v.kind == FINITE:
            rows.append({"place": v.key(), "kind": "finite", "p": v.p, "n_v": v.n_v})
        else:
            rows.append({"place": v.key(), "kind": v.kind, "n_v": v.n_v})
        print(f"{v.key():>8}  {rows[-1]['kind']:<8} n_v={v.n_v}")
    _write_json(args, {"format": FORMAT, "field": args.field, "places": rows})
    return 0


def _cmd_height(args, ctx):
    field = parse_field(args.field)
    x = parse_element(field, args.element)
    rep = weil_height(x, field, ctx)
    places = []
    for c in rep.per_place:
        tag = c.place.key() if c.place.kind == FINITE else "inf"
        entry = {
            "p_or_inf": c.place.p if c.place.kind == FINITE else "inf",
            "place": c.place.key(),
            "n_v": c.n_v,
            "contribution": float(c.contribution.mid),
        }
        places.append(entry)
        print(f"{c.place.key():>8}  n_v={c.n_v}  contribution={entry['contribution']:.12g}")
    print(f"h(x) = {rep.value.str_decimal(25)}")
    _write_json(args, {"format": FORMAT, "value": rep.value.str_decimal(25), "places": places})
    return 0


def _cmd_bundle(args, ctx):
    with open(args.infile) as fh:
        doc = json.load(fh)
    bundle = load_bundle(doc)
    out = {"format": FORMAT, "op": args.op}
    if args.op == "degree":
        v = bundle.degree(ctx)
        print(f"degree = {v.str_decimal(25)}")
        out["value"] = v.str_decimal(25)
    elif args.op == "slope":
        v = bundle.slope(ctx)
        print(f"slope = {v.str_decimal(25)}")
        out["value"] = v.str_decimal(25)
    elif args.op == "maxslope":
        v, exact = bundle.max_slope(ctx)
        print(f"max slope = {v.str_decimal(25)} (exact={exact})")
        out["value"] = v.str_decimal(25)
        out["exact"] = exact
    elif args.op == "dual":
        dual = bundle.dual()
        devs = []
        for place, mat in dual.deviations.items():
            devs.append(
                {
                    "place": place.key(),
                    "matrix": [[_element_str(e) for e in row] for row in mat],
                }
            )
        out["dual"] = {"field": doc["field"], "dim": bundle.dim, "deviations": devs}
        print(json.dumps(out["dual"], indent=2))
    elif args.op == "sym":
        v = sym_max_slope_bound(bundle, args.l, ctx)
        print(f"max-slope bound for S^{args.l}: {v.str_decimal(25)}")
        out["value"] = v.str_decimal(25)
    else:
        raise AdelicError(f"unknown bundle op {args.op}")
    _write_json(args, out)
    return 0


def _element_str(e) -> str:
    if e.is_rational():
        return str(e.as_fraction())
    return "[" + ", ".join(str(c) for c in e.coeffs) + "]"


def _cmd_siegel(args, ctx):
    out = {"format": FORMAT}
    if args.action == "bound":
        if args.kind == "classical":
            v = classical_siegel_bound(args.mu, args.nu, Fraction(args.A))
            print(f"classical bound: {v}")
            out["value"] = v
        else:
            with open(args.infile) as fh:
                bundle = load_bundle(json.load(fh))
            if args.kind == "bombieri_vaaler":
                v = bombieri_vaaler_bound(bundle, ctx=ctx)
            elif args.kind == "absolute":
                v = absolute_siegel_bound(bundle, ctx)
            else:
                raise AdelicError(f"unknown bound kind {args.kind}")
            print(f"{args.kind} bound: {v.str_decimal(25)}")
            out["value"] = v.str_decimal(25)
    else:  # search
        if args.kind == "classical":
            with open(args.infile) as fh:
                rows = load_matrix(json.load(fh))
            w = classical_siegel_search([[int(e) for e in row] for row in rows])
            print(f"witness {w.x} with max-norm {w.height} <= {w.bound}")
            out.update({"witness": w.x, "height": w.height, "bound": w.bound})
        elif args.kind == "approx":
            with open(args.infile) as fh:
                rows = load_matrix(json.load(fh))
            w = approx_siegel_search(rows, args.H, float(args.eps), ctx)
            print(f"witness {w.x} with |x|_inf <= {args.H}")
            out.update({"witness": w.x, "H": args.H})
        elif args.kind == "absolute":
            with open(args.infile) as fh:
                bundle = load_bundle(json.load(fh))
            w = absolute_siegel_witness(bundle, budget=args.budget, ctx=ctx)
            print(
                f"witness {w.x}: h = {w.height.str_decimal(20)} <= {w.bound.str_decimal(20)}"
            )
            out.update({"witness": w.x, "height": w.height.str_decimal(20)})
        else:
            raise AdelicError(f"unknown search kind {args.kind}")
    _write_json(args, out)
    return 0


def _load_bound_instance(path) -> tuple:
    with open(path) as fh:
        doc = json.load(fh)
    if "alpha" in doc:
        inst, kind = load_instance(doc)
        from .linforms import certify_hypotheses

        status, s, I = certify_hypotheses(inst)
        if status == "assumed":
            s = inst.declared_s
            I = tuple(inst.declared_I or range(1, inst.n + 1))
        binst = derive_bound_instance(inst, s, I)
        return binst, kind
    if doc.get("format") != FORMAT:
        raise AdelicError(f'expected "format": "{FORMAT}"')
    binst = BoundInstance(
        n=doc["n"], t=doc["t"], D=doc["D"], eps0=doc["eps0"],
        frak_e=doc.get("frak_e", "e"),
        log_a=tuple(Fraction(str(a)) for a in doc["log_a"]),
        log_b=Fraction(str(doc["log_b"])),
        s=doc.get("s"), I=tuple(doc["I"]) if doc.get("I") else None,
        p=doc.get("p"), beta10_nonzero=doc.get("beta10_nonzero", False),
    )
    return binst, doc.get("kind", "principal")


def _cmd_bound(args, ctx):
    binst, kind = _load_bound_instance(args.infile)
    kind = args.kind or kind
    res = theorem_bound(kind, binst, ctx)
    print(f"kind: {kind}  branch: {res.branch}")
    print(f"bound = -({res.const_base})^{res.const_exponent} * factor")
    print(f"log|bound| = {res.log_magnitude(ctx.prec).str_decimal(25)}")
    print(f"log10|bound| ~ {res.value.decimal_log10(ctx.prec)}")
    _write_json(
        args,
        {
            "format": FORMAT,
            "sign": "-",
            "log_magnitude_decimal": res.log_magnitude(ctx.prec).str_decimal(25),
            "constant": f"({res.const_base})^{res.const_exponent}",
            "branch": res.branch,
        },
    )
    return 0


def _cmd_params(args, ctx):
    binst, _ = _load_bound_instance(args.infile)
    ps = compute_params(binst, ctx)
    rep = check_param_properties(ps, binst, ctx)
    print(f"C0 = {ps.C0}")
    print(f"y = {ps.y}, frak_a = {ps.frak_a}, S0 = {ps.S0}, S = {ps.S}")
    print(f"U0 branch: {ps.branch}; log10 U0 ~ {ps.U0.decimal_log10(ctx.prec)}")
    print(f"log10 Ttilde0 ~ {ps.Ttilde0.decimal_log10(ctx.prec)}")
    for i, d in enumerate(ps.Dtilde):
        print(f"log10 Dtilde_{i} ~ {d.decimal_log10(ctx.prec)}")
    for k, v in rep.items():
        print(f"property ({k}): {'ok' if v else 'FAIL'}")
    _write_json(
        args,
        {
            "format": FORMAT,
            "C0": str(ps.C0), "y": ps.y, "frak_a": ps.frak_a,
            "S0": str(ps.S0), "S": str(ps.S), "U0_branch": ps.branch,
            "log10_U0": ps.U0.decimal_log10(ctx.prec),
            "properties": rep,
        },
    )
    return 0 if all(rep.values()) else 1


def _cmd_delta(args, ctx):
    v = delta_lcm(args.l, getattr(args, "h"))
    print(v)
    _write_json(args, {"format": FORMAT, "l": args.l, "h": args.h, "delta": str(v)})
    return 0


def _cmd_verify(args, ctx):
    with open(args.infile) as fh:
        inst, kind = load_instance(json.load(fh))
    kind = args.kind or kind
    rep = verify_instance(inst, kind, ctx)
    payload = dump_report(rep, ctx.prec)
    for i, lam in enumerate(payload["lambda_abs"], 1):
        print(f"|Lambda_{i}| = {lam}")
    print(f"hypotheses: {rep.hypothesis_status} (s={rep.s}, I={list(rep.I)})")
    print(f"bound: -{payload['bound']['constant']} * ..., branch {rep.bound.branch}")
    print(f"log10 margin ~ {payload['margin_log10']}")
    print("PASS" if rep.passed else "FAIL")
    _write_json(args, payload)
    return 0 if rep.passed else 1


def _cmd_selftest(args, ctx):
    ok = run_all()
    print("selftest:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="adelic-baker",
        description="Places, heights, adelic bundles, Siegel lemmas, and "
        "explicit lower bounds for linear forms in logarithms.",
    )
    ap.add_argument("--prec", type=int, default=100, help="archimedean bits (>= 64)")
    ap.add_argument("--padic-digits", type=int, default=30, help="absolute p-adic digits")
    ap.add_argument("--json", help="write a machine-readable report to PATH")
    ap.add_argument("--seed", type=int, default=0, help="seed for Monte-Carlo oracles")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("places", help="enumerate places of a field")
    p.add_argument("--field", required=True)
    p.add_argument("--prime-bound", type=int, default=20)
    p.add_argument("--skip-bad", action="store_true", help="skip ramified primes")
    p.set_defaults(fn=_cmd_places)

    p = sub.add_parser("height", help="Weil height with per-place table")
    p.add_argument("--field", required=True)
    p.add_argument("--element", required=True)
    p.set_defaults(fn=_cmd_height)

    p = sub.add_parser("bundle", help="bundle arithmetic")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--op", required=True, choices=["degree", "slope", "maxslope", "dual", "sym"])
    p.add_argument("--l", type=int, default=2, help="symmetric power degree")
    p.set_defaults(fn=_cmd_bundle)

    p = sub.add_parser("siegel", help="Siegel bounds and witness searches")
    p.add_argument("action", choices=["bound", "search"])
    p.add_argument("--kind", required=True,
                   choices=["classical", "bombieri_vaaler", "absolute", "approx"])
    p.add_argument("--in", dest="infile")
    p.add_argument("--mu", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--A", default="1")
    p.add_argument("--H", type=int, default=3)
    p.add_argument("--eps", default="0.5")
    p.add_argument("--budget", type=int, default=50)
    p.set_defaults(fn=_cmd_siegel)

    p = sub.add_parser("bound", help="evaluate a theorem bound")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--kind", choices=["intro", "principal", "reduit"])
    p.set_defaults(fn=_cmd_bound)

    p = sub.add_parser("params", help="derived parameters and their properties")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(fn=_cmd_params)

    p = sub.add_parser("delta", help="the lcm quantity delta_l(h)")
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.set_defaults(fn=_cmd_delta)

    p = sub.add_parser("verify", help="verify a linear-form instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--kind", choices=["intro", "principal", "reduit"])
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.set_defaults(fn=_cmd_selftest)
    return ap


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        ctx = PrecisionContext(args.prec, args.padic_digits)
        return args.fn(args, ctx)
    except AdelicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def console_main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    console_main()
