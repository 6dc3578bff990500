"""JSON documents for categories, pairings, functors and convolution data.

Conventions shared by every document:

* object tuples are keys joined by ``"|"`` (``"X|Y"``);
* scalars are ints or ``"n/d"`` strings (Q), ints in ``[0, p)`` (F_p);
* matrices are ``{"rows", "cols", "entries": [[i, j, scalar], ...]}`` with
  only nonzero entries listed.

Loaders raise :class:`StructureError` on malformed input.
"""

from __future__ import annotations

import json
from pathlib import Path

from .convolution import AntipodeData, CompactClosedData, Promonoidal, StarIso
from .functors import CO, CONTRA, Functor
from .linalg import FieldSpec, Mat, mat_from_json, mat_to_json
from .vcat import GroupoidSpec, PairingIso, StructureError, VCategory, linearize_groupoid


def key(t) -> str:
    return "|".join(t) if isinstance(t, tuple) else str(t)


def unkey(s: str) -> tuple:
    return tuple(s.split("|"))


def _mats_out(d: dict) -> dict:
    return {key(k): mat_to_json(m) for k, m in sorted(d.items())}


def _mats_in(f: FieldSpec, d: dict) -> dict:
    return {unkey(k): mat_from_json(f, v) for k, v in d.items()}


def _column(f: FieldSpec, values) -> Mat:
    return Mat.column(f, [f(v) for v in values])


# ---------------------------------------------------------------------------
# categories and pairings


def category_to_json(a: VCategory) -> dict:
    f = a.field
    comp = []
    for (x, y, z), m in sorted(a.comp.items()):
        dxy = a.hom(x, y)
        for k, col, v in m.nonzero_entries():
            j, i = divmod(col, dxy)
            comp.append([x, y, z, i, j, k, f.serialize(v)])
    doc = {
        "field": str(f),
        "objects": list(a.objects),
        "hom": {key(k): d for k, d in sorted(a.hom_dim.items())},
        "comp": comp,
        "ids": {x: [f.serialize(v) for v in a.ids[x].flat()] for x in a.objects},
    }
    if a.groupoid is not None:
        doc["groupoid"] = a.groupoid.to_json()
    if a.factors is not None:
        doc["factors"] = {k: list(v) for k, v in sorted(a.factors.items())}
    return doc


def category_from_json(doc: dict) -> VCategory:
    """Either a full table document or ``{"field", "groupoid"}`` to linearize."""
    try:
        f = FieldSpec.parse(doc["field"])
        if "comp" not in doc and "groupoid" in doc:
            g = GroupoidSpec.from_json(doc["groupoid"])
            g.check()
            return linearize_groupoid(g, f)
        objects = tuple(doc["objects"])
        hom = {unkey(k): int(v) for k, v in doc["hom"].items()}
        for x in objects:
            for y in objects:
                hom.setdefault((x, y), 0)
        entries = {}
        for x, y, z, i, j, k, v in doc["comp"]:
            entries.setdefault((x, y, z), []).append((int(k), int(j) * hom[x, y] + int(i), f(v)))
        comp = {
            t: Mat.from_entries(f, hom[t[0], t[2]], hom[t[1], t[2]] * hom[t[0], t[1]], e)
            for t, e in entries.items()
        }
        ids = {x: _column(f, doc["ids"][x]) for x in objects}
        groupoid = GroupoidSpec.from_json(doc["groupoid"]) if "groupoid" in doc else None
        factors = {k: tuple(v) for k, v in doc["factors"].items()} if "factors" in doc else None
    except (KeyError, ValueError, TypeError, IndexError) as e:
        raise StructureError(f"bad category document: {e}") from e
    return VCategory(f, objects, hom, comp, ids, groupoid, factors)


def pairing_to_json(pa: PairingIso) -> dict:
    return {"phi": _mats_out(pa.phi)}


def pairing_from_json(a: VCategory, doc: dict) -> PairingIso:
    try:
        return PairingIso(a, _mats_in(a.field, doc["phi"]))
    except (KeyError, ValueError, TypeError, IndexError) as e:
        raise StructureError(f"bad pairing document: {e}") from e


# ---------------------------------------------------------------------------
# functors


def functor_to_json(F: Functor) -> dict:
    f = F.field
    act = []
    for (s, src, b), blocks in sorted(F.act.items()):
        for m, blk in enumerate(blocks):
            for r, c, v in blk.nonzero_entries():
                act.append([s, key(src), b, m, r, c, f.serialize(v)])
    return {
        "name": F.name,
        "variance": list(F.variance),
        "dims": {key(t): d for t, d in sorted(F.dims.items()) if d},
        "act": act,
    }


def functor_from_json(a: VCategory, doc: dict) -> Functor:
    """General form, or the bifunctor shorthand with ``lact``/``ract``.

    ``lact`` rows are ``[X', X, Y, m, r, c, v]`` (acting on the contravariant
    slot, ``m`` a basis index of A(X', X)); ``ract`` rows are ``[X, Y, Y', m, r, c, v]``.
    """
    f = a.field
    try:
        if "variance" in doc:
            variance = tuple(doc["variance"])
        elif "lact" in doc or "ract" in doc:
            variance = (CONTRA, CO)
        else:
            raise StructureError("functor document needs 'variance' or 'lact'/'ract'")
        if any(v not in (CO, CONTRA) for v in variance):
            raise StructureError(f"unknown variance in {variance}")
        dims = {unkey(k): int(v) for k, v in doc["dims"].items()}
        rows = [(int(s), unkey(src), b, m, r, c, v) for s, src, b, m, r, c, v in doc.get("act", [])]
        rows += [(0, (x, y), x2, m, r, c, v) for x2, x, y, m, r, c, v in doc.get("lact", [])]
        rows += [(1, (x, y), y2, m, r, c, v) for x, y, y2, m, r, c, v in doc.get("ract", [])]
        grouped = {}
        for s, src, b, m, r, c, v in rows:
            if len(src) != len(variance) or not 0 <= s < len(variance):
                raise StructureError(f"action entry {s, src, b} does not fit arity {len(variance)}")
            grouped.setdefault((s, src, b), []).append((int(m), int(r), int(c), f(v)))
        act = {}
        for (s, src, b), es in grouped.items():
            x, y = (src[s], b) if variance[s] == CO else (b, src[s])
            tgt = src[:s] + (b,) + src[s + 1:]
            per = [[] for _ in range(a.hom(x, y))]
            for m, r, c, v in es:
                per[m].append((r, c, v))
            act[s, src, b] = tuple(
                Mat.from_entries(f, dims.get(tgt, 0), dims.get(src, 0), e) for e in per
            )
    except (KeyError, ValueError, TypeError, IndexError) as e:
        raise StructureError(f"bad functor document: {e}") from e
    return Functor(a, variance, dims, act, doc.get("name", ""))


# ---------------------------------------------------------------------------
# convolution data


def promonoidal_to_json(pm: Promonoidal) -> dict:
    return {
        "category": category_to_json(pm.category),
        "p": functor_to_json(pm.p),
        "j": functor_to_json(pm.j),
        "unit_map": _mats_out(pm.unit_map),
        "commutative": pm.commutative,
    }


def promonoidal_from_json(doc: dict) -> Promonoidal:
    try:
        a = category_from_json(doc["category"])
        return Promonoidal(
            a, functor_from_json(a, doc["p"]), functor_from_json(a, doc["j"]),
            _mats_in(a.field, doc["unit_map"]), bool(doc.get("commutative", True)),
        )
    except (KeyError, ValueError, TypeError) as e:
        raise StructureError(f"bad promonoidal document: {e}") from e


def antipode_to_json(ad: AntipodeData, f: FieldSpec) -> dict:
    return {
        "obj": dict(sorted(ad.obj.items())),
        "hom": _mats_out(ad.hom),
        "sigma": None if ad.sigma is None else {x: [f.serialize(v) for v in m.flat()] for x, m in sorted(ad.sigma.items())},
        "d": _mats_out(ad.d),
        "c": _mats_out(ad.c),
    }


def antipode_from_json(f: FieldSpec, doc: dict) -> AntipodeData:
    try:
        sigma = doc.get("sigma")
        return AntipodeData(
            dict(doc["obj"]), _mats_in(f, doc["hom"]),
            None if sigma is None else {x: _column(f, v) for x, v in sigma.items()},
            _mats_in(f, doc["d"]), _mats_in(f, doc["c"]),
        )
    except (KeyError, ValueError, TypeError, IndexError) as e:
        raise StructureError(f"bad antipode document: {e}") from e


def star_to_json(star: StarIso) -> dict:
    return {
        "components": _mats_out(star.components),
        "factors": {key(k): [mat_to_json(m) for m in ms] for k, ms in sorted(star.factors.items())},
    }


def star_from_json(f: FieldSpec, doc: dict) -> StarIso:
    try:
        factors = {unkey(k): [mat_from_json(f, m) for m in ms] for k, ms in doc.get("factors", {}).items()}
        return StarIso(_mats_in(f, doc["components"]), factors)
    except (KeyError, ValueError, TypeError, IndexError) as e:
        raise StructureError(f"bad star document: {e}") from e


def compact_closed_to_json(cc: CompactClosedData) -> dict:
    return {
        "base": category_to_json(cc.base),
        "tensor_obj": {key(k): v for k, v in sorted(cc.tensor_obj.items())},
        "unit_obj": cc.unit_obj,
        "dual_obj": dict(sorted(cc.dual_obj.items())),
        **{name: _mats_out(getattr(cc, name)) for name in
           ("tensor_hom", "dual_hom", "pair_iso", "curry_dual", "curry_cyc")},
    }


def compact_closed_from_json(doc: dict) -> CompactClosedData:
    try:
        base = category_from_json(doc["base"])
        f = base.field
        return CompactClosedData(
            base, {unkey(k): v for k, v in doc["tensor_obj"].items()}, doc["unit_obj"], dict(doc["dual_obj"]),
            *(_mats_in(f, doc[name]) for name in ("tensor_hom", "dual_hom", "pair_iso", "curry_dual", "curry_cyc")),
        )
    except (KeyError, ValueError, TypeError) as e:
        raise StructureError(f"bad compact closed document: {e}") from e


# ---------------------------------------------------------------------------
# files


def dumps(doc) -> str:
    """Canonical text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise StructureError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise StructureError(f"{path} is not JSON: {e}") from e
