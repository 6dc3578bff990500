"""Promonoidal structures, Day convolution, and the compact-closure certificate.

Everything here is built from coends and ends of explicit functors, so each
claimed isomorphism ends up as a concrete matrix whose rank is checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Sequence

from .coend import (
    ConsistencyError, coend_at, coend_functor, coend_map, coyoneda_reduce, end_functor, end_map, interchange, lemma_alpha,
)
from .functors import (
    CO, CONTRA, Functor, NatFamily, fix_slot, hom_bifunctor, is_natural_iso, natural_violations, permute_slots,
    pointwise_dual, representable, same_functor_data, tensor, tensor_all, validate_functor, build_closure_integrand, _replace,
)
from .groups import FiniteGroup, trivial
from .linalg import FieldSpec, Mat, hom_iso, is_iso, kron, kron_all, permutation_matrix, solve, tensor_permutation
from .vcat import (
    PairingIso, Report, StructureError, VCategory, connected_groupoid, disjoint_union,
    full_subcategory, group_algebra, linearize_groupoid, pairing_on_tensor, tensor_categories, validate_pairing,
)


class StepFailure(ValueError):
    """A step of a certified chain failed; ``step`` names it."""

    def __init__(self, step: str, detail: str):
        super().__init__(f"{step}: {detail}")
        self.step = step
        self.detail = detail


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True, eq=False)
class Promonoidal:
    """``p: A^op (x) A^op (x) A -> V_f``, ``j: A -> V_f`` and the unit law.

    ``unit_map[W, Y, X]: j(Y) (x) p(W, Y, X) -> A(W, X)`` is a family,
    dinatural in ``Y``; the induced map on ``int^Y`` is the unit iso.
    ``commutative`` is unchecked metadata.
    """

    category: VCategory
    p: Functor
    j: Functor
    unit_map: dict
    commutative: bool = True
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.category.field


@dataclass(frozen=True, eq=False)
class AntipodeData:
    """``S: A^op -> A`` with ``S^2 ~= 1`` and the two hypothesis isos.

    * ``obj[x]`` is ``Sx``; ``hom[x, y]: A(x,y) -> A(Sy, Sx)``.
    * ``sigma[x]`` is a column vector in ``A(SSx, x)``; None means absent.
    * ``d[X,Y,Z]: p(X,Y,Z)* -> p(SX,SY,SZ)``.
    * ``c[X,Y,Z]: p(X,Y,SZ) -> p(Y,Z,SX)``.
    """

    obj: dict
    hom: dict
    sigma: dict | None
    d: dict
    c: dict


@dataclass(frozen=True, eq=False)
class StarIso:
    """Components ``s[A,B,C]: int^{XY} j(Y) (x) p(X,B,Y)* (x) p(X,C,A) -> p(A,B,C)*``.

    The domain is presented by :func:`star_domain`; ``factors[A,B,C]`` keeps
    the six matrices whose product is the component when built from an antipode.
    """

    components: dict
    factors: dict = dc_field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class CompactClosedData:
    """A strict compact closed category on a finite object set.

    ``tensor_hom[X, Y, X2, Y2]: C(X,X2) (x) C(Y,Y2) -> C(X(x)Y, X2(x)Y2)``;
    ``dual_hom[X, Y]: C(X,Y) -> C(Y*, X*)``;
    ``pair_iso[X,Y,Z]: C(X(x)Y, Z) -> C(Z, X(x)Y)*``;
    ``curry_dual[X,Y,Z]: C(Z, X(x)Y) -> C(SX(x)SY, SZ)``;
    ``curry_cyc[X,Y,Z]: C(X(x)Y, SZ) -> C(Y(x)Z, SX)``.
    """

    base: VCategory
    tensor_obj: dict
    unit_obj: str
    dual_obj: dict
    tensor_hom: dict
    dual_hom: dict
    pair_iso: dict
    curry_dual: dict
    curry_cyc: dict


# ---------------------------------------------------------------------------
# functor helpers


def precompose_antipode(F: Functor, ad: AntipodeData, slots: Sequence[int]) -> Functor:
    """``G(x) = F(x with S applied at slots)``; those slots flip variance."""
    a = F.category
    slots = set(slots)

    def s_at(t):
        return tuple(ad.obj[x] if k in slots else x for k, x in enumerate(t))

    variance = tuple((CONTRA if v == CO else CO) if k in slots else v for k, v in enumerate(F.variance))
    dims = {}
    for t in F.tuples():
        d = F.dim(s_at(t))
        if d:
            dims[t] = d
    act = {}
    for s in range(F.arity):
        for src in dims:
            ssrc = s_at(src)
            for b in a.objects:
                if s in slots:
                    # G-morphism f maps to S f; S f indexes F's blocks at (Ssrc, Sb)
                    gx, gy = (src[s], b) if variance[s] == CO else (b, src[s])
                    if a.hom(gx, gy) == 0:
                        continue
                    fb = F.blocks(s, ssrc, ad.obj[b])
                    smat = ad.hom[gx, gy]
                    blocks = []
                    for m in range(a.hom(gx, gy)):
                        out = Mat.zeros(a.field, F.dim(_replace(ssrc, s, ad.obj[b])), F.dim(ssrc))
                        for k in range(smat.rows):
                            c = smat[k, m]
                            if c != 0:
                                out = out + fb[k].scale(c)
                        blocks.append(out)
                    act[s, src, b] = tuple(blocks)
                else:
                    got = F.act.get((s, ssrc, b))
                    if got is not None:
                        act[s, src, b] = got
    return Functor(a, variance, dims, act, f"{F.name}.S")


def internal_hom(F: Functor, G: Functor) -> Functor:
    """``[F, G]`` pointwise, spaces as row-major matrices (``hom_iso`` of ``F* (x) G``)."""
    raw = tensor(pointwise_dual(F), G)
    fld = F.field
    nf = F.arity

    def iso(t):
        return hom_iso(fld, F.dim(t[:nf]), G.dim(t[nf:]))

    act = {}
    for (s, src, b), bl in raw.act.items():
        tgt = _replace(src, s, b)
        hs, ht = iso(src), iso(tgt)
        act[s, src, b] = tuple(ht @ m @ hs.T for m in bl)
    return Functor(raw.category, raw.variance, dict(raw.dims), act, f"[{F.name},{G.name}]")


# ---------------------------------------------------------------------------
# validation


def unit_integrand(pm: Promonoidal) -> Functor:
    # slots: 0 Y (co, from j), 1 W (contra), 2 Y (contra), 3 X (co)
    return tensor(pm.j, pm.p)


def unit_iso(pm: Promonoidal, check: bool = True) -> NatFamily:
    """The induced ``int^Y j(Y) (x) p(W,Y,X) -> A(W,X)`` as a family in ``(W, X)``."""
    if "unit_iso" in pm._cache:
        return pm._cache["unit_iso"]
    a = pm.category
    fld = a.field
    F, pres = coend_functor(unit_integrand(pm), [(2, 0)], check)
    hom = hom_bifunctor(a)
    comps = {}
    for (w, x), pr in pres.items():
        total = Mat.hstack(
            fld, [_unit_component(pm, w, y, x) for (y,) in pr.keys], rows=a.hom(w, x)
        )
        comps[w, x] = coend_map(pr, Mat.identity(fld, a.hom(w, x)), total, check)
    out = NatFamily(F, hom, comps, "unit")
    pm._cache["unit_iso"] = out
    return out


def _unit_component(pm: Promonoidal, w, y, x) -> Mat:
    m = pm.unit_map.get((w, y, x))
    shape = (pm.category.hom(w, x), pm.j.dim((y,)) * pm.p.dim((w, y, x)))
    if m is None:
        return Mat.zeros(pm.field, *shape)
    if m.shape != shape:
        raise StructureError(f"unit_map({w},{y},{x}) has shape {m.shape}, expected {shape}")
    return m


def validate_promonoidal(pm: Promonoidal) -> Report:
    rep = Report()
    if pm.p.variance != (CONTRA, CONTRA, CO):
        raise StructureError("p must have variance (contra, contra, co)")
    if pm.j.variance != (CO,):
        raise StructureError("j must be covariant")
    rep.extend(validate_functor(pm.p), "p: ")
    rep.extend(validate_functor(pm.j), "j: ")
    if not rep.ok:
        return rep
    try:
        u = unit_iso(pm)
    except ConsistencyError:
        rep.add("unit: unit_map is not dinatural in Y")
        return rep
    rep.extend(is_natural_iso(u), "unit: ")
    return rep


def validate_antipode(pm: Promonoidal, ad: AntipodeData) -> Report:
    """Functoriality of S, naturality of sigma, d, c and their invertibility.

    Violations are prefixed with the name of the hypothesis they break.
    """
    a = pm.category
    fld = a.field
    rep = Report()
    for x in a.objects:
        if ad.obj.get(x) not in a.objects:
            raise StructureError(f"S({x}) is not an object of A")
    for x, y in product(a.objects, repeat=2):
        m = ad.hom.get((x, y))
        if m is None or m.shape != (a.hom(ad.obj[y], ad.obj[x]), a.hom(x, y)):
            raise StructureError(f"S on hom({x},{y}) missing or misshapen")
    for x in a.objects:
        sx = ad.obj[x]
        if ad.hom[x, x] @ a.identity(x) != a.identity(sx):
            rep.add(f"S: identity of {x} not preserved")
    for x, y, z in product(a.objects, repeat=3):
        dxy, dyz = a.hom(x, y), a.hom(y, z)
        if dxy * dyz == 0:
            continue
        sx, sy, sz = ad.obj[x], ad.obj[y], ad.obj[z]
        lhs = ad.hom[x, z] @ a.comp_mat(x, y, z)
        rhs = a.comp_mat(sz, sy, sx) @ kron(ad.hom[x, y], ad.hom[y, z]) @ tensor_permutation(fld, [dyz, dxy], [1, 0])
        if lhs != rhs:
            rep.add(f"S: S(g o f) != S(f) o S(g) at ({x},{y},{z})")
    if ad.sigma is None:
        rep.add("sigma: S^2 ~= 1 data missing")
    else:
        for x in a.objects:
            ssx = ad.obj[ad.obj[x]]
            s = ad.sigma.get(x)
            if s is None or s.shape != (a.hom(ssx, x), 1):
                rep.add(f"sigma: component at {x} missing")
                continue
            # invertible: some tau in A(x, SSx) with sigma o tau = id and tau o sigma = id
            post = a.comp_mat(x, ssx, x) @ kron(s, Mat.identity(fld, a.hom(x, ssx)))
            tau = solve(post, a.identity(x)) if post.cols else None
            if tau is None or a.compose(tau, s, ssx, x, ssx) != a.identity(ssx):
                rep.add(f"sigma: component at {x} not invertible")
        for x, y in product(a.objects, repeat=2):
            ssx, ssy = ad.obj[ad.obj[x]], ad.obj[ad.obj[y]]
            if a.hom(x, y) == 0 or x not in ad.sigma or y not in ad.sigma:
                continue
            ss = ad.hom[ad.obj[y], ad.obj[x]] @ ad.hom[x, y]  # A(x,y) -> A(SSx, SSy)
            for k in range(a.hom(x, y)):
                f = Mat.unit_vector(fld, a.hom(x, y), k)
                lhs = a.compose(ad.sigma[y], ss @ f, ssx, ssy, y)
                rhs = a.compose(f, ad.sigma[x], ssx, x, y)
                if lhs != rhs:
                    rep.add(f"sigma: not natural at f#{k}: {x}->{y}")
    d_fam, c_fam = antipode_families(pm, ad)
    rep.extend(is_natural_iso(d_fam), "d (hypothesis p(X,Y,Z)* ~= p(SX,SY,SZ)): ")
    rep.extend(is_natural_iso(c_fam), "c (hypothesis p(X,Y,SZ) ~= p(Y,Z,SX)): ")
    return rep


def antipode_families(pm: Promonoidal, ad: AntipodeData) -> tuple[NatFamily, NatFamily]:
    p = pm.p
    d_fam = NatFamily(pointwise_dual(p), precompose_antipode(p, ad, [0, 1, 2]), dict(ad.d), "d")
    src_c = precompose_antipode(p, ad, [2])
    tgt_c = permute_slots(src_c, [2, 0, 1])  # (X,Y,Z) |-> p(Y, Z, SX)
    c_fam = NatFamily(src_c, tgt_c, dict(ad.c), "c")
    return d_fam, c_fam


# ---------------------------------------------------------------------------
# Day convolution


def day_tensor(f: Functor, g: Functor, pm: Promonoidal, check: bool = True) -> tuple[Functor, dict]:
    """``(F (x) G)(A) = int^{X,C} F X (x) G C (x) p(X, C, A)``."""
    integrand = tensor_all([f, g, pm.p])  # X+, C+, X-, C-, A+
    return coend_functor(integrand, [(2, 0), (3, 1)], check)


def day_hom_integrand(g: Functor, h: Functor, pm: Promonoidal) -> Functor:
    # [G B (x) p(A,B',C), H C']: slots B-, A+, B'+, C-, C'+
    return internal_hom(tensor(g, pm.p), h)


def day_hom(g: Functor, h: Functor, pm: Promonoidal, check: bool = True) -> tuple[Functor, dict]:
    """``[G, H](A) = int_{B,C} [G B (x) p(A, B, C), H C]``."""
    return end_functor(day_hom_integrand(g, h, pm), [(0, 2), (3, 4)], check)


def day_dual(g: Functor, pm: Promonoidal, check: bool = True) -> tuple[Functor, dict]:
    """``G*(X) = int^B (G B)* (x) int^Y j(Y) (x) p(X, B, Y)*``, as one coend over ``(B, Y)``."""
    integrand = tensor_all([pointwise_dual(g), pm.j, pointwise_dual(pm.p)])  # B-, Y+, X+, B+, Y-
    return coend_functor(integrand, [(0, 3), (4, 1)], check)


# ---------------------------------------------------------------------------
# star isomorphism


def star_integrand(pm: Promonoidal) -> Functor:
    # j(Y) (x) p(X,B,Y)* (x) p(X,C,A): slots 0 Y+, 1 X+, 2 B+, 3 Y-, 4 X-, 5 C-, 6 A+
    return tensor_all([pm.j, pointwise_dual(pm.p), pm.p])


STAR_PAIRS = [(4, 1), (3, 0)]  # keys (X, Y); rest slots (B, C, A)


def star_domain(pm: Promonoidal) -> tuple[Functor, dict]:
    """The domain of the star isomorphism as a functor of ``(B, C, A)`` with its presentations."""
    if "star_domain" not in pm._cache:
        pm._cache["star_domain"] = coend_functor(star_integrand(pm), STAR_PAIRS)
    return pm._cache["star_domain"]


def star_target(pm: Promonoidal) -> Functor:
    """``p(A,B,C)*`` as a functor of ``(B, C, A)``."""
    return permute_slots(pointwise_dual(pm.p), [1, 2, 0])


def validate_star(pm: Promonoidal, star: StarIso) -> Report:
    dom, _ = star_domain(pm)
    fam = NatFamily(dom, star_target(pm), {(b, c, a): m for (a, b, c), m in star.components.items()}, "star")
    return is_natural_iso(fam)


def _require_iso(step: str, m: Mat, where) -> Mat:
    if not is_iso(m):
        raise StepFailure(step, f"not invertible at {where} (shape {m.shape}, rank {m.rank()})")
    return m


STAR_STEPS = (
    "1 by hyp (d)",
    "2 by hyp and S^2 ~= 1 (c, sigma)",
    "3 since j*p ~= A(-,-) (unit)",
    "4 by Yoneda",
    "5 by hyp and S^2 ~= 1 (c, sigma)",
    "6 by hyp (d)",
)


def star_from_antipode(pm: Promonoidal, ad: AntipodeData, check: bool = True) -> StarIso:
    """Compose the six isomorphisms of the chain into the star iso, per ``(A, B, C)``."""
    rep = validate_antipode(pm, ad)
    if not rep.ok:
        first = rep.violations[0]
        if first.startswith("sigma"):
            step = STAR_STEPS[1]
        elif first.startswith("c "):
            step = STAR_STEPS[1]
        elif first.startswith("d "):
            step = STAR_STEPS[0]
        else:
            step = "antipode"
        raise StepFailure(step, str(rep))
    urep = validate_promonoidal(pm)
    if not urep.ok:
        raise StepFailure(STAR_STEPS[2], str(urep))
    a = pm.category
    fld = a.field
    p = pm.p
    S = ad.obj
    dom_f, dom_pres = star_domain(pm)

    pS = precompose_antipode(p, ad, [0, 1, 2])  # (X+, B+, Y-) |-> p(SX, SB, SY)
    q = permute_slots(precompose_antipode(p, ad, [0]), [2, 0, 1])  # (X+, B+, Y-) |-> p(SB, Y, X)
    d2_f = tensor_all([pm.j, pS, p])
    d3_f = tensor_all([pm.j, q, p])

    components, factors = {}, {}
    for (b, c, x_a), P1 in dom_pres.items():
        rest = (b, c, x_a)
        P2 = coend_at(d2_f, STAR_PAIRS, rest)
        P3 = coend_at(d3_f, STAR_PAIRS, rest)
        where = f"(A,B,C)=({x_a},{b},{c})"

        # step 1: d inside the coend
        blocks = []
        for (x, y) in P1.keys:
            blocks.append(kron_all(fld, [Mat.identity(fld, pm.j.dim((y,))), ad.d[x, b, y], Mat.identity(fld, p.dim((x, c, x_a)))]))
        st1 = _require_iso(STAR_STEPS[0], coend_map(P1, P2.q.proj, Mat.block_diag(fld, blocks), check), where)

        # step 2: p(SX,SB,SY) -> p(SB, Y, SSX) -> p(SB, Y, X)
        blocks = []
        for (x, y) in P2.keys:
            cm = ad.c[S[x], S[b], y]
            sig = p.action(2, (S[b], y, S[S[x]]), x, ad.sigma[x])
            blocks.append(kron_all(fld, [Mat.identity(fld, pm.j.dim((y,))), sig @ cm, Mat.identity(fld, p.dim((x, c, x_a)))]))
        st2 = _require_iso(STAR_STEPS[1], coend_map(P2, P3.q.proj, Mat.block_diag(fld, blocks), check), where)

        # step 3: int^Y j(Y) (x) p(SB,Y,X) -> A(SB, X), inside int^X
        m_fun = fix_slot(fix_slot(p, 2, x_a), 1, c)  # X |-> p(X, C, A), contravariant
        P4 = coend_at(tensor(representable(a, S[b]), m_fun), [(1, 0)])
        cols = []
        for (x, y) in P3.keys:
            u = _unit_component(pm, S[b], y, x)  # j(Y) (x) p(SB,Y,X) -> A(SB,X)
            piece = P4.inject((x,)) @ kron(u, Mat.identity(fld, p.dim((x, c, x_a))))
            cols.append(piece)
        st3 = _require_iso(STAR_STEPS[2], coend_map(P3, Mat.identity(fld, P4.dim), Mat.hstack(fld, cols, rows=P4.dim), check), where)

        # step 4: Yoneda
        y_iso, _ = coyoneda_reduce(m_fun, S[b])
        st4 = _require_iso(STAR_STEPS[3], y_iso, where)

        # step 5: p(SB, C, A) -> p(SB, C, SSA) -> p(SA, SB, SC)
        sig_a = p.action(2, (S[b], c, S[S[x_a]]), x_a, ad.sigma[x_a])
        _require_iso(STAR_STEPS[4], sig_a, where)
        c_a = _require_iso(STAR_STEPS[4], ad.c[S[x_a], S[b], c], where)
        st5 = c_a.inverse() @ sig_a.inverse()

        # step 6: p(SA,SB,SC) -> p(A,B,C)*
        st6 = _require_iso(STAR_STEPS[5], ad.d[x_a, b, c], where).inverse()

        steps = [st1, st2, st3, st4, st5, st6]
        comp = st6 @ st5 @ st4 @ st3 @ st2 @ st1
        components[x_a, b, c] = comp
        factors[x_a, b, c] = steps
    star = StarIso(components, factors)
    nat = validate_star(pm, star)
    if not nat.ok:
        raise StepFailure("composite naturality in A, B, C", str(nat))
    return star


# ---------------------------------------------------------------------------
# the compact-closure certificate


@dataclass(frozen=True, eq=False)
class ClosureWitness:
    family: dict  # A -> Mat (G* (x) H)(A) -> [G, H](A)
    iso: bool
    natural: bool
    lhs_dims: dict
    rhs_dims: dict
    steps: dict  # A -> {step name: Mat}
    interchange_checked: bool

    def report(self) -> dict:
        per = {
            a: {"lhs_dim": self.lhs_dims[a], "rhs_dim": self.rhs_dims[a], "iso": is_iso(self.family[a])}
            for a in self.family
        }
        verdict = "compact-closure-certified" if self.iso and self.natural else (
            "not-natural" if self.iso else "not-iso"
        )
        return {"per_object": per, "natural": self.natural, "verdict": verdict}


CLOSURE_STEPS = (
    "by defn of tensor",
    "rebracket",
    "by (*)",
    "reorder",
    "by the lemma",
    "hom_iso",
)


def closure_witness(
    g: Functor,
    h: Functor,
    pm: Promonoidal,
    star: StarIso,
    phi: PairingIso,
    check_interchange: bool = True,
    check: bool = True,
) -> ClosureWitness:
    """Compose the convolution chain into ``(G* (x) H)(A) -> [G, H](A)`` for every ``A``."""
    a = pm.category
    fld = a.field
    for name, fun in (("G", g), ("H", h)):
        r = validate_functor(fun)
        if not r.ok:
            raise StepFailure(CLOSURE_STEPS[0], f"{name} invalid: {r}")
    prep = validate_pairing(phi)
    if not prep.ok:
        raise StepFailure(CLOSURE_STEPS[4], f"pairing invalid: {prep}")
    srep = validate_star(pm, star)
    if not srep.ok:
        raise StepFailure(CLOSURE_STEPS[2], f"star iso invalid: {srep}")
    p = pm.p
    gs, gs_pres = day_dual(g, pm, check)
    lhs_f, lhs_pres = day_tensor(gs, h, pm, check)
    rhs_f, rhs_pres = day_hom(g, h, pm, check)
    _, star_pres = star_domain(pm)
    aa = tensor_categories(a, a)
    phi2 = pairing_on_tensor(phi, phi)
    phi2 = PairingIso(aa, phi2.phi)
    gd = pointwise_dual(g)
    pd = pointwise_dual(p)

    family, steps = {}, {}
    for x_a in a.objects:
        L = lhs_pres[(x_a,)]
        R = rhs_pres[(x_a,)]
        # big integrand: (GB)* (x) j(Y) (x) p(X,B,Y)* (x) HC (x) p(X,C,A)
        big_f = tensor_all([gd, pm.j, pd, h, fix_slot(p, 2, x_a)])  # 0 B-,1 Y+,2 X+,3 B+,4 Y-,5 C+,6 X-,7 C-
        BIG = coend_at(big_f, [(6, 2), (7, 5), (0, 3), (4, 1)])  # keys (X, C, B, Y)
        mid_f = tensor_all([gd, h, fix_slot(pd, 0, x_a)])  # 0 B-, 1 C+, 2 B+, 3 C-
        MID = coend_at(mid_f, [(0, 2), (3, 1)])  # keys (B, C)
        U = build_closure_integrand(g, h, p, x_a, aa)
        la = lemma_alpha(aa, U, phi2, check)
        CU, EU = la.coend, la.end

        # rebracket: L total at (X, C) is G*(X) (x) H(C) (x) p(X,C,A)
        cols = []
        for (x, c) in L.keys:
            gp = gs_pres[(x,)]
            dhc, dp = h.dim((c,)), p.dim((x, c, x_a))
            tot = Mat.zeros(fld, BIG.total_dim, gp.dim * dhc * dp)
            for (b, y) in gp.keys:
                if gp.dim_at((b, y)) == 0:
                    continue
                restrict = gp.embed((b, y)).T @ gp.q.section
                tot = tot + BIG.embed((x, c, b, y)) @ kron(restrict, Mat.identity(fld, dhc * dp))
            cols.append(BIG.q.proj @ tot)
        st_rebracket = _require_iso(CLOSURE_STEPS[1], coend_map(L, Mat.identity(fld, BIG.dim), Mat.hstack(fld, cols, rows=BIG.dim), check), x_a)

        # star: regroup to (GB)* (x) HC (x) [j(Y) (x) p(X,B,Y)* (x) p(X,C,A)], apply s_{A,B,C}
        cols = []
        for (x, c, b, y) in BIG.keys:
            dgb, dj, dpxby, dhc, dpxca = gd.dim((b,)), pm.j.dim((y,)), p.dim((x, b, y)), h.dim((c,)), p.dim((x, c, x_a))
            n = dgb * dj * dpxby * dhc * dpxca
            if n == 0:
                cols.append(Mat.zeros(fld, MID.dim, 0))
                continue
            perm = tensor_permutation(fld, [dgb, dj, dpxby, dhc, dpxca], [0, 3, 1, 2, 4])
            sp = star_pres[(b, c, x_a)]
            s = star.components[x_a, b, c] @ sp.inject((x, y))
            apply = kron_all(fld, [Mat.identity(fld, dgb * dhc), s])
            cols.append(MID.q.proj @ MID.embed((b, c)) @ apply @ perm)
        st_star = _require_iso(CLOSURE_STEPS[2], coend_map(BIG, Mat.identity(fld, MID.dim), Mat.hstack(fld, cols, rows=MID.dim), check), x_a)

        # reorder (GB)* (x) HC (x) p* to U's diagonal (GB)* (x) p* (x) HC
        blocks = []
        for (bc,) in CU.keys:
            b, c = aa.factors[bc]
            blocks.append(tensor_permutation(fld, [gd.dim((b,)), h.dim((c,)), p.dim((x_a, b, c))], [0, 2, 1]))
        st_reorder = _require_iso(CLOSURE_STEPS[3], coend_map(MID, CU.q.proj, Mat.block_diag(fld, blocks), check), x_a)

        # alpha over A (x) A
        if check_interchange:
            ic = interchange(aa, U, check)
            if not ic.iso:
                raise StepFailure(CLOSURE_STEPS[4], f"interchange hypothesis fails on the closure integrand at A={x_a}")
        st_lemma = _require_iso(CLOSURE_STEPS[4], la.induced, x_a)

        # hom_iso into [G B (x) p(A,B,C), H C]
        blocks = []
        for (bc,) in EU.keys:
            b, c = aa.factors[bc]
            blocks.append(hom_iso(fld, g.dim((b,)) * p.dim((x_a, b, c)), h.dim((c,))))
        st_hom = _require_iso(CLOSURE_STEPS[5], end_map(R, Mat.block_diag(fld, blocks) @ EU.k.basis, check), x_a)

        fam = st_hom @ st_lemma @ st_reorder @ st_star @ st_rebracket
        family[x_a] = fam
        steps[x_a] = dict(zip(CLOSURE_STEPS[1:], [st_rebracket, st_star, st_reorder, st_lemma, st_hom]))
    nat = natural_violations(NatFamily(lhs_f, rhs_f, {(x,): m for x, m in family.items()}))
    iso = all(is_iso(m) for m in family.values())
    return ClosureWitness(
        family, iso, nat.ok,
        {x: lhs_pres[(x,)].dim for x in a.objects}, {x: rhs_pres[(x,)].dim for x in a.objects},
        steps, check_interchange,
    )


# ---------------------------------------------------------------------------
# constructions


def trace_promonoidal(cc: CompactClosedData, a_objects: Sequence[str]) -> tuple[Promonoidal, AntipodeData]:
    """``p(X,Y,Z) = C(X (x) Y, Z)``, ``j(X) = C(I, X)`` on the full subcategory on ``a_objects``."""
    base = cc.base
    fld = base.field
    a_objects = tuple(a_objects)
    for x in a_objects:
        if cc.dual_obj[x] not in a_objects:
            raise StructureError(f"dual of {x} leaves the chosen objects")
    a = full_subcategory(base, a_objects)
    T = cc.tensor_obj
    I = cc.unit_obj

    def tensor_map(x, y, x2, y2, f, g):
        """``f (x) g`` as a vector of C(x(x)y, x2(x)y2)."""
        return cc.tensor_hom[x, y, x2, y2] @ kron(f, g)

    dims, act = {}, {}
    for x, y, z in product(a_objects, repeat=3):
        d = base.hom(T[x, y], z)
        if d:
            dims[x, y, z] = d
    for (x, y, z), d in dims.items():
        xy = T[x, y]
        for x2 in a_objects:  # f in A(x2, x) acting on slot 0
            blocks = []
            for k in range(a.hom(x2, x)):
                f = Mat.unit_vector(fld, a.hom(x2, x), k)
                fx1 = tensor_map(x2, y, x, y, f, base.identity(y))  # C(x2 y, x y)
                blocks.append(_precompose_by(base, fx1, T[x2, y], xy, z))
            if blocks:
                act[0, (x, y, z), x2] = tuple(blocks)
        for y2 in a_objects:  # slot 1
            blocks = []
            for k in range(a.hom(y2, y)):
                f = Mat.unit_vector(fld, a.hom(y2, y), k)
                f1x = tensor_map(x, y2, x, y, base.identity(x), f)
                blocks.append(_precompose_by(base, f1x, T[x, y2], xy, z))
            if blocks:
                act[1, (x, y, z), y2] = tuple(blocks)
        for z2 in a_objects:  # slot 2, covariant
            if a.hom(z, z2):
                act[2, (x, y, z), z2] = tuple(base.post(xy, z, z2))
    p = Functor(a, (CONTRA, CONTRA, CO), dims, act, "C(-(x)-,-)")
    j = Functor(
        a, (CO,), {(x,): base.hom(I, x) for x in a_objects if base.hom(I, x)},
        {(0, (x,), y): tuple(base.post(I, x, y)) for x, y in product(a_objects, repeat=2) if base.hom(I, x) and a.hom(x, y)},
        "C(I,-)",
    )
    unit_map = {}
    for w, y, x in product(a_objects, repeat=3):
        dj, dp = base.hom(I, y), base.hom(T[w, y], x)
        if dj * dp == 0:
            continue
        cols = []
        for i in range(dj):
            av = Mat.unit_vector(fld, dj, i)
            one_a = tensor_map(w, I, w, y, base.identity(w), av)  # C(w (x) I, w (x) y) = C(w, w y)
            cols.append(_precompose_by(base, one_a, T[w, I], T[w, y], x))
        unit_map[w, y, x] = Mat.hstack(fld, cols, rows=base.hom(T[w, I], x))
    pm = Promonoidal(a, p, j, unit_map)

    S = {x: cc.dual_obj[x] for x in a_objects}
    shom = {(x, y): cc.dual_hom[x, y] for x, y in product(a_objects, repeat=2)}
    sigma = {x: a.identity(x) for x in a_objects}
    d, c = {}, {}
    for x, y, z in product(a_objects, repeat=3):
        pair = cc.pair_iso[x, y, z]
        d[x, y, z] = cc.curry_dual[x, y, z] @ pair.T.inverse() if pair.rows else Mat.zeros(fld, 0, 0)
        c[x, y, z] = cc.curry_cyc[x, y, z]
    return pm, AntipodeData(S, shom, sigma, d, c)


def _precompose_by(base: VCategory, m: Mat, x: str, y: str, z: str) -> Mat:
    """The matrix of ``- o m : C(y, z) -> C(x, z)`` for a vector ``m`` in C(x, y)."""
    pres = base.pre(x, y, z)
    out = Mat.zeros(base.field, base.hom(x, z), base.hom(y, z))
    for k, blk in enumerate(pres):
        c = m[k, 0]
        if c != 0:
            out = out + blk.scale(c)
    return out


def graded_skeleton(group: FiniteGroup, f: FieldSpec) -> CompactClosedData:
    """The discrete compact closed category of ``G``-graded lines (``G`` abelian)."""
    for x, y in product(group.elements, repeat=2):
        if group.mul(x, y) != group.mul(y, x):
            raise StructureError(f"{group.name} is not abelian")
    g = disjoint_union([connected_groupoid([x], trivial()) for x in group.elements])
    base = linearize_groupoid(g, f)
    els = group.elements
    T = {(x, y): group.mul(x, y) for x, y in product(els, repeat=2)}
    D = {x: group.inv(x) for x in els}

    def line(cond):
        return Mat.identity(f, 1) if cond else Mat.zeros(f, 0, 0)

    tensor_hom = {}
    for x, y, x2, y2 in product(els, repeat=4):
        dx, dy = int(x == x2), int(y == y2)
        rows = base.hom(T[x, y], T[x2, y2])
        tensor_hom[x, y, x2, y2] = Mat.from_entries(f, rows, dx * dy, [(0, 0, 1)] if rows and dx * dy else [])
    dual_hom = {(x, y): line(x == y) for x, y in product(els, repeat=2)}
    pair_iso, curry_dual, curry_cyc = {}, {}, {}
    for x, y, z in product(els, repeat=3):
        pair_iso[x, y, z] = line(T[x, y] == z)
        curry_dual[x, y, z] = line(T[x, y] == z)
        curry_cyc[x, y, z] = line(group.mul(T[x, y], z) == group.identity)
    return CompactClosedData(base, T, group.identity, D, tensor_hom, dual_hom, pair_iso, curry_dual, curry_cyc)


def graded_delta_promonoidal(group: FiniteGroup, f: FieldSpec, objects: Sequence[str] | None = None) -> Promonoidal:
    """Direct construction: ``p(x,y,z) = k`` iff ``xy = z``, ``j(x) = k`` iff ``x = e``."""
    objects = tuple(objects or group.elements)
    g = disjoint_union([connected_groupoid([x], trivial()) for x in group.elements])
    a = full_subcategory(linearize_groupoid(g, f), objects)
    one = Mat.identity(f, 1)
    dims = {(x, y, z): 1 for x, y, z in product(objects, repeat=3) if group.mul(x, y) == z}
    act = {}
    for (x, y, z) in dims:
        act[0, (x, y, z), x] = (one,)
        act[1, (x, y, z), y] = (one,)
        act[2, (x, y, z), z] = (one,)
    p = Functor(a, (CONTRA, CONTRA, CO), dims, act, "delta")
    e = group.identity
    j = Functor(a, (CO,), {(e,): 1} if e in objects else {}, {(0, (e,), e): (one,)} if e in objects else {}, "delta_e")
    unit_map = {(w, e, w): one for w in objects} if e in objects else {}
    return Promonoidal(a, p, j, unit_map)


def bialgebra_promonoidal(group: FiniteGroup, f: FieldSpec) -> tuple[Promonoidal, AntipodeData]:
    """One object with hom ``k[G]``; ``p = k[G] (x) k[G]`` with diagonal covariant action."""
    a = group_algebra(group, f)
    o = "*"
    els = group.elements
    n = len(els)
    idx = {g: i for i, g in enumerate(els)}

    def perm(fn):
        return permutation_matrix(f, [idx[fn(g)] for g in els])

    def right(h):
        return perm(lambda g: group.mul(g, h))

    def left(h):
        return perm(lambda g: group.mul(h, g))

    eye = Mat.identity(f, n)
    act = {
        (0, (o, o, o), o): tuple(kron(right(h), eye) for h in els),
        (1, (o, o, o), o): tuple(kron(eye, right(h)) for h in els),
        (2, (o, o, o), o): tuple(kron(left(h), left(h)) for h in els),
    }
    p = Functor(a, (CONTRA, CONTRA, CO), {(o, o, o): n * n}, act, "k[G](x)k[G]")
    j = Functor(a, (CO,), {(o,): 1}, {(0, (o,), o): tuple(Mat.identity(f, 1) for _ in els)}, "eps")
    # 1 (x) a (x) b |-> a * eps(b)
    unit = Mat.from_entries(f, n, n * n, [(ia, ia * n + ib, 1) for ia in range(n) for ib in range(n)])
    pm = Promonoidal(a, p, j, {(o, o, o): unit})
    S = {o: o}
    shom = {(o, o): perm(group.inv)}
    sigma = {o: a.identity(o)}
    d = {(o, o, o): Mat.identity(f, n * n)}
    # a (x) b |-> a^-1 b (x) a^-1
    c_entries = []
    for ga in els:
        for gb in els:
            ai = group.inv(ga)
            c_entries.append((idx[group.mul(ai, gb)] * n + idx[ai], idx[ga] * n + idx[gb], 1))
    c = {(o, o, o): Mat.from_entries(f, n * n, n * n, c_entries)}
    return pm, AntipodeData(S, shom, sigma, d, c)


def same_promonoidal_data(x: Promonoidal, y: Promonoidal) -> bool:
    """Data equality of ``p``, ``j`` (dims and nonzero actions) and unit maps."""
    if x.category.objects != y.category.objects:
        return False
    if not (same_functor_data(x.p, y.p) and same_functor_data(x.j, y.j)):
        return False
    keys = {k for k, m in x.unit_map.items() if m.rows * m.cols} | {k for k, m in y.unit_map.items() if m.rows * m.cols}
    return all(_unit_component(x, *k) == _unit_component(y, *k) for k in keys)
