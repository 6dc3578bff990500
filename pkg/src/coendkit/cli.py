"""Command line entry point: ``coendkit <subcommand> ...``.

Exit codes: 0 when every verdict is as expected, 1 when a verdict differs
(a potential soundness finding), 2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import serialize as ser
from .coend import ConsistencyError, InvalidInput, coend, end, verdict_report
from .convolution import (
    StepFailure, closure_witness, day_dual, day_tensor, star_from_antipode, validate_antipode,
    validate_promonoidal, validate_star,
)
from .functors import CO, CONTRA, Functor, validate_functor
from .fuzz import Bounds, fuzz
from .gallery import find, gallery
from .linalg import FieldMismatch, FieldSpec, mat_to_json
from .vcat import StructureError, VCategory, validate_category, validate_pairing

EXPECTED, DIFFERS, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _require(report, what: str) -> None:
    if not report.ok:
        raise InputError(f"invalid {what}: {report}")


def _category(path) -> VCategory:
    a = ser.category_from_json(ser.load(path))
    _require(validate_category(a), "category")
    return a


def _functor(a: VCategory, path, variance=None) -> Functor:
    F = ser.functor_from_json(a, ser.load(path))
    if variance is not None and F.variance != variance:
        raise InputError(f"{path}: expected variance {list(variance)}, got {list(F.variance)}")
    _require(validate_functor(F), f"functor {path}")
    return F


def _bifunctor(a, path):
    return _functor(a, path, (CONTRA, CO))


def _pairing(a, path):
    pa = ser.pairing_from_json(a, ser.load(path))
    _require(validate_pairing(pa), "pairing")
    return pa


def _promonoidal(path):
    pm = ser.promonoidal_from_json(ser.load(path))
    _require(validate_category(pm.category), "promonoidal category")
    _require(validate_functor(pm.p), "p")
    _require(validate_functor(pm.j), "j")
    _require(validate_promonoidal(pm), "promonoidal unit law")
    return pm


def _dims(F: Functor) -> dict:
    return {ser.key(t): F.dim(t) for t in F.tuples()}


# ---------------------------------------------------------------------------
# subcommands; each returns (report, exit code)


def cmd_validate(args):
    doc = ser.load(args.file)
    if "p" in doc and "j" in doc:
        kind = "promonoidal"
        pm = ser.promonoidal_from_json(doc)
        rep = validate_category(pm.category)
        for name, r in (("p", validate_functor(pm.p)), ("j", validate_functor(pm.j))):
            rep.extend(r, f"{name}: ")
        if rep.ok:
            rep.extend(validate_promonoidal(pm))
    elif "obj" in doc or "components" in doc:
        if not args.promonoidal:
            raise InputError("validating antipode or star data needs --promonoidal")
        pm = _promonoidal(args.promonoidal)
        if "obj" in doc:
            kind = "antipode"
            rep = validate_antipode(pm, ser.antipode_from_json(pm.field, doc))
        else:
            kind = "star"
            rep = validate_star(pm, ser.star_from_json(pm.field, doc))
    elif "phi" in doc or "dims" in doc:
        if not args.category:
            raise InputError("validating a pairing or functor needs --category")
        a = _category(args.category)
        if "phi" in doc:
            kind = "pairing"
            rep = validate_pairing(ser.pairing_from_json(a, doc))
        else:
            kind = "functor"
            rep = validate_functor(ser.functor_from_json(a, doc))
    else:
        kind = "category"
        rep = validate_category(ser.category_from_json(doc))
    return {"kind": kind, "ok": rep.ok, "violations": list(rep.violations)}, EXPECTED if rep.ok else BAD_INPUT


def cmd_coend(args):
    a = _category(args.category)
    pres = coend(_bifunctor(a, args.bifunctor))
    out = {"coend_dim": pres.dim}
    if args.emit_witness:
        out["witness"] = {"projection": mat_to_json(pres.q.proj)}
    return out, EXPECTED


def cmd_end(args):
    a = _category(args.category)
    pres = end(_bifunctor(a, args.bifunctor))
    out = {"end_dim": pres.dim}
    if args.emit_witness:
        out["witness"] = {"inclusion": mat_to_json(pres.k.basis)}
    return out, EXPECTED


def cmd_interchange(args):
    a = _category(args.category)
    out = verdict_report(a, _bifunctor(a, args.bifunctor), None, args.emit_witness)
    return out, EXPECTED if out["interchange_iso"] else DIFFERS


def cmd_lemma(args):
    a = _category(args.category)
    t = _bifunctor(a, args.bifunctor)
    out = verdict_report(a, t, _pairing(a, args.pairing), args.emit_witness)
    return out, EXPECTED if out["interchange_iso"] and out["alpha_iso"] else DIFFERS


def cmd_convolve(args):
    pm = _promonoidal(args.promonoidal)
    conv, _ = day_tensor(_functor(pm.category, args.F, (CO,)), _functor(pm.category, args.G, (CO,)), pm)
    out = {"dims": _dims(conv)}
    if args.emit_witness:
        out["functor"] = ser.functor_to_json(conv)
    return out, EXPECTED


def cmd_dual(args):
    pm = _promonoidal(args.promonoidal)
    dual, _ = day_dual(_functor(pm.category, args.G, (CO,)), pm)
    out = {"dims": _dims(dual)}
    if args.emit_witness:
        out["functor"] = ser.functor_to_json(dual)
    return out, EXPECTED


def cmd_closure(args):
    pm = _promonoidal(args.promonoidal)
    a, f = pm.category, pm.field
    doc = ser.load(args.star)
    phi = _pairing(a, args.pairing)
    g = _functor(a, args.G, (CO,))
    h = _functor(a, args.H, (CO,))
    try:
        if "obj" in doc:
            star = star_from_antipode(pm, ser.antipode_from_json(f, doc))
        else:
            star = ser.star_from_json(f, doc)
            _require(validate_star(pm, star), "star isomorphism")
        w = closure_witness(g, h, pm, star, phi)
    except StepFailure as e:
        return {"verdict": e.step, "detail": e.detail}, DIFFERS
    out = w.report()
    if args.emit_witness:
        out["witness"] = {a_obj: mat_to_json(m) for a_obj, m in sorted(w.family.items())}
    return out, EXPECTED if out["verdict"] == "compact-closure-certified" else DIFFERS


def cmd_gallery(args):
    scenarios = find(args.name) if args.name else gallery()
    if not scenarios:
        raise InputError(f"no scenario named {args.name!r}")
    results = [s.run() for s in scenarios]
    ok = all(r["ok"] for r in results)
    return {"scenarios": results, "ok": ok}, EXPECTED if ok else DIFFERS


def cmd_fuzz(args):
    fields = tuple(str(FieldSpec.parse(x)) for x in args.field.split(","))
    bounds = Bounds(max_objects=args.max_objects, max_hom=args.max_hom, max_dim=args.max_dim, fields=fields)
    out = fuzz(args.seed, args.count, bounds)
    return out, EXPECTED if not out["violations"] else DIFFERS


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="also write the JSON report here")
    common.add_argument("--emit-witness", action="store_true", help="include witness matrices")

    p = argparse.ArgumentParser(prog="coendkit", description="Exact coends, ends and Day convolution over Q and F_p.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *positional, help=None):
        sp = sub.add_parser(name, parents=[common], help=help)
        for arg in positional:
            sp.add_argument(arg)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("validate", cmd_validate, "file", help="validate any JSON document")
    sp.add_argument("--category", help="category for functor and pairing documents")
    sp.add_argument("--promonoidal", help="promonoidal for antipode and star documents")
    add("coend", cmd_coend, "category", "bifunctor", help="dimension of the coend")
    add("end", cmd_end, "category", "bifunctor", help="dimension of the end")
    add("interchange", cmd_interchange, "category", "bifunctor", help="coend of ends against end of coends")
    add("lemma", cmd_lemma, "category", "bifunctor", "pairing", help="the alpha map from a hom pairing")
    add("convolve", cmd_convolve, "promonoidal", "F", "G", help="Day convolution F * G")
    add("dual", cmd_dual, "promonoidal", "G", help="the dual G*")
    add("closure", cmd_closure, "promonoidal", "star", "pairing", "G", "H",
        help="certify G* (x) H ~= [G, H]; star may be a star or an antipode document")
    sp = add("gallery", cmd_gallery, help="run curated scenarios")
    sp.add_argument("--name", help="scenario name, with or without field suffix")
    sp = add("fuzz", cmd_fuzz, help="random groupoid instances")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--max-objects", type=int, default=3)
    sp.add_argument("--max-hom", type=int, default=3, help="largest vertex group order (1 to 3)")
    sp.add_argument("--max-dim", type=int, default=2, help="largest module dimension")
    sp.add_argument("--field", default="Q", help="Q, Fp, or a comma separated list")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = args.fn(args)
    except ConsistencyError as e:
        report, code = {"error": f"internal consistency check failed: {e}"}, DIFFERS
    except (InputError, StructureError, InvalidInput, FieldMismatch, ValueError) as e:
        report, code = {"error": str(e)}, BAD_INPUT
    text = ser.dumps(report)
    sys.stdout.write(text)
    if args.out:
        args.out.write_text(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
