"""Curated instances with independently derived expectations, and brute-force oracles."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Callable

from .coend import coend, end, interchange, lemma_alpha
from .convolution import (
    closure_witness, day_tensor, graded_skeleton, star_from_antipode, trace_promonoidal,
    bialgebra_promonoidal, Promonoidal, AntipodeData,
)
from .functors import CO, Functor, constant, from_representation, hom_bifunctor, pointwise_dual, tensor
from .groups import FiniteGroup, by_name, cyclic, symmetric3
from .linalg import FieldSpec, Mat, QQ, is_iso
from .vcat import (
    PairingIso, VCategory, connected_groupoid, delta_pairing, disjoint_union, group_algebra, linearize_groupoid,
    matrix_algebra, trace_pairing, unit_category, form_pairing,
)

F5 = FieldSpec(5)


# ---------------------------------------------------------------------------
# oracles: plain structure constants, no category or coend machinery


@dataclass(frozen=True)
class MultTable:
    """``mult[i][j]`` is the coefficient list of ``e_i e_j``."""

    field: FieldSpec
    dim: int
    mult: tuple


def group_table(group: FiniteGroup, f: FieldSpec) -> MultTable:
    idx = {g: k for k, g in enumerate(group.elements)}
    n = group.order
    rows = []
    for a in group.elements:
        row = []
        for b in group.elements:
            v = [0] * n
            v[idx[group.mul(a, b)]] = 1
            row.append(tuple(v))
        rows.append(tuple(row))
    return MultTable(f, n, tuple(rows))


def matrix_table(n: int, f: FieldSpec) -> MultTable:
    d = n * n
    rows = []
    for a, b in product(range(n), repeat=2):
        row = []
        for c, e in product(range(n), repeat=2):
            v = [0] * d
            if b == c:
                v[a * n + e] = 1
            row.append(tuple(v))
        rows.append(tuple(row))
    return MultTable(f, d, tuple(rows))


def oracle_hh0(t: MultTable) -> int:
    """``dim H / [H, H]``: codimension of the span of all ``e_i e_j - e_j e_i``."""
    f = t.field
    comms = [
        [f(x) - f(y) for x, y in zip(t.mult[i][j], t.mult[j][i])]
        for i in range(t.dim) for j in range(i + 1, t.dim)
    ]
    if not comms:
        return t.dim
    return t.dim - Mat.from_rows(f, comms, t.dim).rank()


def oracle_center(t: MultTable) -> int:
    """``dim Z(H)``: solve ``a e_j = e_j a`` for all ``j``."""
    f = t.field
    # one equation per (j, output coordinate k); unknowns a_i
    eqs = []
    for j in range(t.dim):
        for k in range(t.dim):
            eqs.append([f(t.mult[i][j][k]) - f(t.mult[j][i][k]) for i in range(t.dim)])
    return t.dim - Mat.from_rows(f, eqs, t.dim).rank()


def graded_closure_dims(group: FiniteGroup, gdims: dict, hdims: dict) -> dict:
    """``(G* (x) H)(a) = sum over x y = a of G(x^-1) H(y)`` on graded lines."""
    out = {}
    for a in group.elements:
        out[a] = sum(gdims[group.inv(x)] * hdims[y] for x in group.elements for y in group.elements if group.mul(x, y) == a)
    return out


def graded_hom_dims(group: FiniteGroup, gdims: dict, hdims: dict) -> dict:
    """``[G, H](a) = sum over a b = c of dim G(b) dim H(c)``."""
    return {a: sum(gdims[b] * hdims[group.mul(a, b)] for b in group.elements) for a in group.elements}


# ---------------------------------------------------------------------------
# modules


def graded_module(a: VCategory, dims: dict, name: str = "") -> Functor:
    """A functor on a discrete category: just a space at each object."""
    f = a.field
    d = {(x,): n for x, n in dims.items() if n}
    act = {(0, (x,), x): (Mat.identity(f, n),) for (x,), n in d.items()}
    return Functor(a, (CO,), d, act, name)


def unimodular(f: FieldSpec, n: int, rng: random.Random) -> Mat:
    """A random product of elementary matrices: invertible with an integral inverse."""
    m = Mat.identity(f, n)
    if n < 2:
        return m
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2)
        e = Mat.from_entries(f, n, n, [(k, k, 1) for k in range(n)] + [(i, j, rng.choice((-1, 1)))])
        m = e @ m
    return m


def _characters(group: FiniteGroup) -> list[dict]:
    """Homomorphisms to {+1, -1}, by brute force."""
    out = []
    for signs in product((1, -1), repeat=group.order):
        chi = dict(zip(group.elements, signs))
        if all(chi[group.mul(a, b)] == chi[a] * chi[b] for a in group.elements for b in group.elements):
            out.append(chi)
    return out


def group_rep_matrices(group: FiniteGroup, f: FieldSpec, dim: int, rng: random.Random) -> dict:
    """A random ``dim``-dimensional representation, as ``{element: matrix}``.

    Trivial and regular orbits, each optionally twisted by a sign character,
    glued block-diagonally and conjugated by a random unimodular matrix.
    """
    chars = _characters(group) if f.p != 2 else [dict.fromkeys(group.elements, 1)]
    idx = {g: k for k, g in enumerate(group.elements)}
    n = group.order
    blocks = []
    left = dim
    while left:
        size = rng.choice([s for s in (1, n) if s <= left])
        chi = rng.choice(chars)
        if size == 1:
            blocks.append({g: Mat.from_entries(f, 1, 1, [(0, 0, chi[g])]) for g in group.elements})
        else:
            # left regular action, e_h -> chi(g) e_{gh}
            blocks.append({
                g: Mat.from_entries(f, n, n, [(idx[group.mul(g, h)], idx[h], chi[g]) for h in group.elements])
                for g in group.elements
            })
        left -= size
    p = unimodular(f, dim, rng)
    pinv = p.inverse()
    return {g: p @ Mat.block_diag(f, [b[g] for b in blocks]) @ pinv for g in group.elements}


def group_module(a: VCategory, group: FiniteGroup, mats: dict, name: str = "") -> Functor:
    """Covariant functor on ``group_algebra(group)`` from element matrices."""
    names = a.groupoid.hom["*", "*"]
    dim = next(iter(mats.values())).rows
    return from_representation(a, {m: mats[g] for m, g in zip(names, group.elements)}, {"*": dim})


def random_group_module(a: VCategory, group: FiniteGroup, dim: int, rng: random.Random) -> Functor:
    return group_module(a, group, group_rep_matrices(group, a.field, dim, rng), f"M{dim}")


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Expect:
    value: object
    provenance: str


@dataclass(frozen=True)
class Scenario:
    name: str
    field: str
    build: Callable[[], dict]
    expected: dict  # key -> Expect

    def run(self) -> dict:
        got = self.build()
        checks = {}
        for key in sorted(self.expected):
            e = self.expected[key]
            checks[key] = {
                "expected": _jsonable(e.value), "computed": _jsonable(got.get(key)),
                "provenance": e.provenance, "ok": _jsonable(got.get(key)) == _jsonable(e.value),
            }
        return {"name": self.name, "field": self.field, "checks": checks, "ok": all(c["ok"] for c in checks.values())}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def bifunctor_verdicts(a: VCategory, t: Functor, phi: PairingIso | None) -> dict:
    out = {
        "coend_dim": coend(t).dim,
        "end_dim": end(t).dim,
        "interchange_iso": interchange(a, t).iso,
    }
    if phi is not None:
        la = lemma_alpha(a, t, phi)
        out["alpha_iso"] = la.iso
        out["alpha_rank"] = la.induced.rank()
    return out


def closure_verdicts(pm: Promonoidal, ad: AntipodeData, phi: PairingIso, g: Functor, h: Functor) -> dict:
    star = star_from_antipode(pm, ad)
    w = closure_witness(g, h, pm, star, phi)
    objs = pm.category.objects
    return {
        "star_factors_invertible": all(is_iso(m) for fs in star.factors.values() for m in fs),
        "lhs_dims": {x: w.lhs_dims[x] for x in objs},
        "rhs_dims": {x: w.rhs_dims[x] for x in objs},
        "iso": w.iso,
        "natural": w.natural,
        "verdict": w.report()["verdict"],
    }


CERTIFIED = {
    "star_factors_invertible": Expect(True, "derived: antipode chain, each step rank-checked"),
    "iso": Expect(True, "claim: Day convolution on [A, V_f] is compact closed"),
    "natural": Expect(True, "claim: Day convolution on [A, V_f] is compact closed"),
    "verdict": Expect("compact-closure-certified", "claim: Day convolution on [A, V_f] is compact closed"),
}


def _fields():
    return ((QQ, "Q"), (F5, "F5"))


def _unit_scenarios(f, tag):
    n = 2
    a = unit_category(f)

    def bif():
        k1 = constant(a, 1)
        return bifunctor_verdicts(a, tensor(pointwise_dual(k1), constant(a, n)), delta_free_pairing(a))

    yield Scenario(f"unit-{tag}", tag, bif, {
        "coend_dim": Expect(n, "trivial"), "end_dim": Expect(n, "trivial"),
        "interchange_iso": Expect(True, "trivial"), "alpha_iso": Expect(True, "trivial"),
    })

    def clo():
        pm, ad = bialgebra_promonoidal(cyclic(1), f)
        b = pm.category
        k2 = group_module(b, cyclic(1), {"e": Mat.identity(f, n)})
        return closure_verdicts(pm, ad, delta_pairing(b), k2, k2)

    yield Scenario(f"unit-closure-{tag}", tag, clo, {
        **CERTIFIED,
        "lhs_dims": Expect({"*": n * n}, "trivial"), "rhs_dims": Expect({"*": n * n}, "trivial"),
    })


def delta_free_pairing(a: VCategory) -> PairingIso:
    """The identity pairing on the unit category."""
    return form_pairing(a, {x: a.identity(x).T for x in a.objects})


def _algebra_scenarios(f, tag):
    cases = [
        ("Z2", lambda: group_algebra(cyclic(2), f), lambda a: delta_pairing(a), group_table(cyclic(2), f)),
        ("Z3", lambda: group_algebra(cyclic(3), f), lambda a: delta_pairing(a), group_table(cyclic(3), f)),
        ("S3", lambda: group_algebra(symmetric3(), f), lambda a: delta_pairing(a), group_table(symmetric3(), f)),
        ("M2", lambda: matrix_algebra(2, f), lambda a: trace_pairing(2, f), matrix_table(2, f)),
    ]
    for label, mk, mkphi, table in cases:
        def build(mk=mk, mkphi=mkphi):
            a = mk()
            return bifunctor_verdicts(a, hom_bifunctor(a), mkphi(a))

        hh0, cen = oracle_hh0(table), oracle_center(table)
        yield Scenario(f"hh0-center-{label}-{tag}", tag, build, {
            "coend_dim": Expect(hh0, "derived: commutator-span oracle"),
            "end_dim": Expect(cen, "derived: center oracle"),
            "interchange_iso": Expect(True, "claim: interchange is absolute for finite object sets"),
            "alpha_iso": Expect(True, "claim: interchange iso and valid pairing give alpha iso"),
            "alpha_rank": Expect(min(hh0, cen), "derived: oracle dims"),
        })


def _groupoid_scenarios(f, tag):
    parts = {
        "groupoid-ab-Z2": [(("a", "b"), cyclic(2))],
        "groupoid-ab-Z2-c-Z3": [(("a", "b"), cyclic(2)), (("c",), cyclic(3))],
    }
    for label, comps in parts.items():
        def build(comps=comps):
            g = disjoint_union([connected_groupoid(objs, grp) for objs, grp in comps])
            a = linearize_groupoid(g, f)
            return bifunctor_verdicts(a, hom_bifunctor(a), delta_pairing(a))

        # coend and end of the hom bifunctor: one dimension per conjugacy class per component
        classes = sum(oracle_hh0(group_table(grp, f)) for _, grp in comps)
        centers = sum(oracle_center(group_table(grp, f)) for _, grp in comps)
        yield Scenario(f"{label}-{tag}", tag, build, {
            "coend_dim": Expect(classes, "derived: vertex-group commutator oracle, one per component"),
            "end_dim": Expect(centers, "derived: vertex-group center oracle, one per component"),
            "interchange_iso": Expect(True, "claim: interchange is absolute for finite object sets"),
            "alpha_iso": Expect(True, "claim: interchange iso and valid pairing give alpha iso"),
        })


GRADED_CASES = {
    "graded-Z2-closure": ("Z2", None, {"e": 2, "g": 3}, {"e": 1, "g": 4}),
    "graded-Z3-closure": ("Z3", None, {"e": 1, "g": 2, "g2": 3}, {"e": 2, "g": 1, "g2": 1}),
    "graded-Z4-partial-closure": ("Z4", ("e", "g", "g3"), {"e": 1, "g": 2, "g3": 1}, {"e": 2, "g": 1, "g3": 3}),
}


def _graded_scenarios(f, tag):
    for label, (gname, objs, gd, hd) in GRADED_CASES.items():
        grp = by_name(gname)

        def build(grp=grp, objs=objs, gd=gd, hd=hd):
            cc = graded_skeleton(grp, f)
            pm, ad = trace_promonoidal(cc, objs or grp.elements)
            a = pm.category
            return closure_verdicts(pm, ad, delta_pairing(a), graded_module(a, gd, "G"), graded_module(a, hd, "H"))

        exp = dict(CERTIFIED)
        if objs is None:
            exp["lhs_dims"] = Expect(graded_closure_dims(grp, gd, hd), "derived: delta p collapses the coend to a sum")
            exp["rhs_dims"] = Expect(graded_hom_dims(grp, gd, hd), "derived: delta p collapses the end to a sum")
        yield Scenario(f"{label}-{tag}", tag, build, exp)


def _bialgebra_scenarios(f, tag):
    for gname in ("Z2", "Z3"):
        grp = by_name(gname)

        def build(grp=grp):
            pm, ad = bialgebra_promonoidal(grp, f)
            a = pm.category
            rng = random.Random(f"bialgebra-{grp.name}-{f}")
            g = random_group_module(a, grp, 2, rng)
            h = random_group_module(a, grp, 3, rng)
            out = closure_verdicts(pm, ad, delta_pairing(a), g, h)
            reg = group_module(a, grp, group_rep_matrices_regular(grp, f))
            out["regular_tensor_regular_dim"] = day_tensor(reg, reg, pm)[0].dim(("*",))
            return out

        n = grp.order
        yield Scenario(f"bialgebra-{gname}-{tag}", tag, build, {
            **CERTIFIED,
            "lhs_dims": Expect({"*": 6}, "derived: dim G* (x) H = dim G dim H for the diagonal action"),
            "rhs_dims": Expect({"*": 6}, "derived: dim Hom(G, H) = dim G dim H"),
            "regular_tensor_regular_dim": Expect(n * n, "derived: coend collapses to the diagonal action"),
        })


def group_rep_matrices_regular(group: FiniteGroup, f: FieldSpec) -> dict:
    idx = {g: k for k, g in enumerate(group.elements)}
    n = group.order
    return {g: Mat.from_entries(f, n, n, [(idx[group.mul(g, h)], idx[h], 1) for h in group.elements]) for g in group.elements}


def gallery() -> list[Scenario]:
    out = []
    for f, tag in _fields():
        out.extend(_unit_scenarios(f, tag))
        out.extend(_algebra_scenarios(f, tag))
        out.extend(_groupoid_scenarios(f, tag))
        out.extend(_graded_scenarios(f, tag))
        out.extend(_bialgebra_scenarios(f, tag))
    return out


def scenario_names() -> list[str]:
    return [s.name for s in gallery()]


def find(name: str) -> list[Scenario]:
    """Scenarios called ``name``, or all fields of it when the field suffix is left off."""
    return [s for s in gallery() if s.name == name or s.name.rsplit("-", 1)[0] == name]


def gallery_promonoidals() -> list[tuple[str, Promonoidal, AntipodeData]]:
    """Every promonoidal instance the gallery uses, with its antipode."""
    out = []
    for f, tag in _fields():
        out.append((f"unit-{tag}", *bialgebra_promonoidal(cyclic(1), f)))
        for label, (gname, objs, _, _) in GRADED_CASES.items():
            grp = by_name(gname)
            out.append((f"{label}-{tag}", *trace_promonoidal(graded_skeleton(grp, f), objs or grp.elements)))
        for gname in ("Z2", "Z3"):
            out.append((f"bialgebra-{gname}-{tag}", *bialgebra_promonoidal(by_name(gname), f)))
    return out
