"""Ends and coends as kernels and cokernels, the interchange map, and alpha.

For a functor ``F`` and a list of slot pairs ``(contra, co)``, the coend
over those pairs is presented as the cokernel of

    delta: (+) hom(y, x) (x) F(.., x, y, ..)  ->  (+)_keys F(diagonal)

whose block for ``g (x) t`` is ``F(g, 1) t`` placed at key ``y`` minus
``F(1, g) t`` placed at key ``x``.  The end is the kernel of

    delta': (+)_keys F(diagonal)  ->  (+) [hom(x, y), F(.., x, y, ..)]

sending ``t`` to ``f |-> F(1, f) t_x - F(f, 1) t_y``.  Remaining slots carry
the induced action, so iterated (co)ends are (co)ends of the result.

Both maps are only evaluated on the category's generating morphisms: the
conditions for ``g o f`` and for linear combinations follow from functoriality,
so the cokernel and kernel are unchanged and the matrices are much smaller.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, partial
from itertools import product
from collections.abc import Sequence

from .functors import CO, CONTRA, Functor, dinatural_violations, representable, tensor, hom_bifunctor
from .linalg import (
    FieldSpec, Mat, QuotientProjection, SubspaceInclusion, cokernel, hom_iso, is_iso, kernel, kron, mat_to_json,
    offsets, permutation_matrix, product_is_zero,
)
from .vcat import PairingIso, StructureError, VCategory, validate_pairing


class ConsistencyError(AssertionError):
    """An internal well-definedness check failed: an implementation bug, not a math outcome."""


class InvalidInput(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class _Layout:
    field: FieldSpec
    keys: tuple  # one object per integrated variable
    full: tuple  # the functor's full object tuple at each key
    dims: tuple

    @cached_property
    def offs(self) -> list[int]:
        return offsets(self.dims)

    @cached_property
    def index(self) -> dict:
        return {k: i for i, k in enumerate(self.keys)}

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def offset(self, key) -> int:
        return self.offs[self.index[tuple(key)]]

    def dim_at(self, key) -> int:
        return self.dims[self.index[tuple(key)]]

    def embed(self, key) -> Mat:
        key = tuple(key)
        o, d = self.offset(key), self.dim_at(key)
        return Mat.from_entries(self.field, self.total_dim, d, [(o + i, i, 1) for i in range(d)])


@dataclass(frozen=True, eq=False)
class CoendPresentation(_Layout):
    relations: Mat = None
    q: QuotientProjection = None

    @property
    def dim(self) -> int:
        return self.q.dim

    def inject(self, key) -> Mat:
        """The coprojection from the summand at ``key`` into the coend."""
        key = tuple(key)
        o = self.offset(key)
        return self.q.proj.col_block(o, o + self.dim_at(key))


@dataclass(frozen=True, eq=False)
class EndPresentation(_Layout):
    constraints: Mat = None
    k: SubspaceInclusion = None

    @property
    def dim(self) -> int:
        return self.k.dim

    def project(self, key) -> Mat:
        """The projection from the end onto the factor at ``key``."""
        key = tuple(key)
        o = self.offset(key)
        return self.k.basis.row_block(o, o + self.dim_at(key))


def _check_pairs(F: Functor, pairs: Sequence[tuple[int, int]]) -> list[int]:
    used = [s for p in pairs for s in p]
    if len(set(used)) != len(used) or any(not (0 <= s < F.arity) for s in used):
        raise StructureError(f"bad slot pairs {pairs} for arity {F.arity}")
    for c, o in pairs:
        if F.variance[c] != CONTRA or F.variance[o] != CO:
            raise StructureError(f"pair {(c, o)} must be (contravariant, covariant)")
    return [s for s in range(F.arity) if s not in used]


def _layout(F: Functor, pairs, rest_slots, rest) -> tuple[tuple, tuple, tuple]:
    objects = F.category.objects
    keys = tuple(product(objects, repeat=len(pairs)))
    fulls = []
    for key in keys:
        full = [None] * F.arity
        for s, x in zip(rest_slots, rest):
            full[s] = x
        for (c, o), x in zip(pairs, key):
            full[c] = full[o] = x
        fulls.append(tuple(full))
    return keys, tuple(fulls), tuple(F.dim(t) for t in fulls)


def _with(full: tuple, slots: Sequence[int], x) -> tuple:
    out = list(full)
    for s in slots:
        out[s] = x
    return tuple(out)


def coend_at(F: Functor, pairs: Sequence[tuple[int, int]], rest: tuple = ()) -> CoendPresentation:
    """Coend over ``pairs`` with the remaining slots fixed at ``rest``."""
    pairs = [tuple(p) for p in pairs]
    rest_slots = _check_pairs(F, pairs)
    fld = F.field
    a = F.category
    keys, fulls, dims = _layout(F, pairs, rest_slots, rest)
    lay = _Layout(fld, keys, fulls, dims)
    entries = []
    col = 0
    for v, (c, o) in enumerate(pairs):
        for key, full in zip(keys, fulls):
            x = key[v]
            for y in a.objects:
                # t in F(.., c=x, o=y, ..); g in A(y, x)
                src = _with(full, [o], y)
                d = F.dim(src)
                if d == 0:
                    continue
                ky = key[:v] + (y,) + key[v + 1:]
                oy, ox = lay.offset(ky), lay.offset(key)
                lb = F.blocks(c, src, y)
                rb = F.blocks(o, src, x)
                for g in a.generators(y, x):
                    for i, j, val in lb[g].nonzero_entries():
                        entries.append((oy + i, col + j, val))
                    for i, j, val in rb[g].nonzero_entries():
                        entries.append((ox + i, col + j, -val))
                    col += d
    rel = Mat.from_entries(fld, lay.total_dim, col, entries)
    return CoendPresentation(fld, keys, fulls, dims, relations=rel, q=cokernel(rel))


def end_at(F: Functor, pairs: Sequence[tuple[int, int]], rest: tuple = ()) -> EndPresentation:
    """End over ``pairs`` with the remaining slots fixed at ``rest``."""
    pairs = [tuple(p) for p in pairs]
    rest_slots = _check_pairs(F, pairs)
    fld = F.field
    a = F.category
    keys, fulls, dims = _layout(F, pairs, rest_slots, rest)
    lay = _Layout(fld, keys, fulls, dims)
    entries = []
    row = 0
    for v, (c, o) in enumerate(pairs):
        for key, full in zip(keys, fulls):
            x = key[v]
            for y in a.objects:
                # constraint lands in F(.., c=x, o=y, ..), one block per f in A(x, y)
                tgt = _with(full, [o], y)
                dt = F.dim(tgt)
                gens = a.generators(x, y)
                if dt == 0 or not gens:
                    continue
                ky = key[:v] + (y,) + key[v + 1:]
                full_y = _with(full, [c, o], y)
                ox, oy = lay.offset(key), lay.offset(ky)
                # F(1,f) from the x-diagonal minus F(f,1) from the y-diagonal, one
                # block of rows per generator f
                co_blocks = F.blocks(o, full, y)
                contra_blocks = F.blocks(c, full_y, x)
                for m in gens:
                    for r, j, val in co_blocks[m].nonzero_entries():
                        entries.append((row + r, ox + j, val))
                    for r, j, val in contra_blocks[m].nonzero_entries():
                        entries.append((row + r, oy + j, -val))
                    row += dt
    cons = Mat.from_entries(fld, row, lay.total_dim, entries)
    return EndPresentation(fld, keys, fulls, dims, constraints=cons, k=kernel(cons))


# ---------------------------------------------------------------------------
# maps between presentations


def coend_map(src: CoendPresentation, tgt_proj: Mat, total_map: Mat, check: bool = True) -> Mat:
    """Descend ``total_map`` (from src's total space) along src's quotient.

    ``tgt_proj`` is post-composed first (pass an identity for maps into a plain space).
    """
    m = tgt_proj @ total_map
    if check and not product_is_zero(m, src.relations):
        raise ConsistencyError("map does not kill the coend relations")
    return m @ src.q.section


def end_map(tgt: EndPresentation, total_map: Mat, check: bool = True) -> Mat:
    """Factor ``total_map`` (into tgt's total space) through the end inclusion."""
    if check and not product_is_zero(tgt.constraints, total_map):
        raise ConsistencyError("image does not lie in the end")
    return tgt.k.left_inverse @ total_map


def coend_functor(F: Functor, pairs: Sequence[tuple[int, int]], check: bool = True) -> tuple[Functor, dict]:
    """The coend as a functor of the remaining slots, with every presentation."""
    pairs = [tuple(p) for p in pairs]
    rest_slots = _check_pairs(F, pairs)
    a = F.category
    pres = {rest: coend_at(F, pairs, rest) for rest in product(a.objects, repeat=len(rest_slots))}
    return _induced(F, rest_slots, pres, "coend", check), pres


def end_functor(F: Functor, pairs: Sequence[tuple[int, int]], check: bool = True) -> tuple[Functor, dict]:
    pairs = [tuple(p) for p in pairs]
    rest_slots = _check_pairs(F, pairs)
    a = F.category
    pres = {rest: end_at(F, pairs, rest) for rest in product(a.objects, repeat=len(rest_slots))}
    return _induced(F, rest_slots, pres, "end", check), pres


class _LazyBlocks(Sequence):
    """Morphism blocks computed on first access.

    Iterated (co)ends only read the generator blocks of an induced action, and
    each block costs two large products, so the rest are left until asked for.
    """

    def __init__(self, n: int, make):
        self._n = n
        self._make = make
        self._done = {}

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, m):
        if isinstance(m, slice):
            return [self[i] for i in range(*m.indices(self._n))]
        if not -self._n <= m < self._n:
            raise IndexError(m)
        m %= self._n
        if m not in self._done:
            self._done[m] = self._make(m)
        return self._done[m]


def _induced(F: Functor, rest_slots, pres: dict, kind: str, check: bool) -> Functor:
    a = F.category
    fld = F.field
    dims = {rest: p.dim for rest, p in pres.items() if p.dim}
    act = {}

    def block(s, p, pt, b, m):
        total = Mat.block_diag(fld, [F.blocks(s, full, b)[m] for full in p.full])
        if kind == "coend":
            return coend_map(p, pt.q.proj, total, check)
        return end_map(pt, total @ p.k.basis, check)

    for k, s in enumerate(rest_slots):
        for rest, p in pres.items():
            if p.dim == 0:
                continue
            for b in a.objects:
                tgt_rest = rest[:k] + (b,) + rest[k + 1:]
                pt = pres[tgt_rest]
                if pt.dim == 0:
                    continue
                x, y = (rest[k], b) if F.variance[s] == CO else (b, rest[k])
                n = a.hom(x, y)
                if n:
                    act[k, rest, b] = _LazyBlocks(n, partial(block, s, p, pt, b))
    variance = tuple(F.variance[s] for s in rest_slots)
    return Functor(a, variance, dims, act, f"{kind}({F.name})")


def coend(t: Functor) -> CoendPresentation:
    """``int^X T(X, X)`` for a bifunctor ``T``."""
    if t.variance != (CONTRA, CO):
        raise StructureError("coend() expects a bifunctor (contra, co)")
    return coend_at(t, [(0, 1)])


def end(t: Functor) -> EndPresentation:
    """``int_Y T(Y, Y)`` for a bifunctor ``T``."""
    if t.variance != (CONTRA, CO):
        raise StructureError("end() expects a bifunctor (contra, co)")
    return end_at(t, [(0, 1)])


# ---------------------------------------------------------------------------
# interchange and alpha


@dataclass(frozen=True, eq=False)
class Interchange:
    map: Mat
    iso: bool
    domain: CoendPresentation
    codomain: EndPresentation


def interchange(a: VCategory, t: Functor, check: bool = True) -> Interchange:
    """The canonical map ``int^X int_Y A(Y,X) (x) T(X,Y) -> int_Y int^X A(Y,X) (x) T(X,Y)``.

    The class of an end element ``(s_Y)_Y`` at ``X`` goes to the family of
    its coend classes.  Both well-definedness conditions are asserted.
    """
    if t.category is not a and not t.category.same_data(a):
        raise StructureError("bifunctor lives over a different category")
    # slots: 0 y1 (contra), 1 x2 (co) from A(Y,X); 2 x1 (contra), 3 y2 (co) from T(X,Y)
    K = tensor(hom_bifunctor(t.category), t)
    inner_end, end_pres = end_functor(K, [(0, 3)], check)  # slots (x2 co, x1 contra)
    dom = coend_at(inner_end, [(1, 0)])
    inner_coend, coend_pres = coend_functor(K, [(2, 1)], check)  # slots (y1 contra, y2 co)
    cod = end_at(inner_coend, [(0, 1)])
    fld = a.field
    cols = []
    for (x,) in dom.keys:
        ep = end_pres[x, x]
        # total of cod is (+)_Y inner_coend(Y, Y); component Y = coend_pres[Y,Y].inject(X) o ep.project(Y)
        rows = [coend_pres[y, y].inject((x,)) @ ep.project((y,)) for (y,) in cod.keys]
        total = Mat.vstack(fld, rows, cols=ep.dim)
        cols.append(end_map(cod, total, check))
    total_map = Mat.hstack(fld, cols, rows=cod.dim)
    m = coend_map(dom, Mat.identity(fld, cod.dim), total_map, check)
    return Interchange(m, is_iso(m), dom, cod)


@dataclass(frozen=True, eq=False)
class LemmaAlpha:
    components: dict
    induced: Mat
    iso: bool
    coend: CoendPresentation
    end: EndPresentation


def alpha_components(t: Functor, phi: PairingIso) -> dict:
    """``alpha[X,Y]: T(X,X) -> T(Y,Y)``.

    ``t |-> (f |-> T(1,f) t)`` into ``[A(X,Y), T(X,Y)]``, back to
    ``A(X,Y)* (x) T(X,Y)``, then ``phi^-1 (x) 1`` to ``A(Y,X) (x) T(X,Y)``,
    then ``g (x) t |-> T(g,1) t``.
    """
    a = t.category
    fld = a.field
    out = {}
    for x, y in product(a.objects, repeat=2):
        dxx, dyy = t.dim((x, x)), t.dim((y, y))
        dA, dT = a.hom(x, y), t.dim((x, y))
        if dxx == 0 or dyy == 0 or dA == 0 or dT == 0:
            out[x, y] = Mat.zeros(fld, dyy, dxx)
            continue
        can_in = hom_iso(fld, dA, dT) @ t.curried(1, (x, x), y)
        back = hom_iso(fld, dA, dT).inverse()
        transport = kron(phi.inverse(x, y), Mat.identity(fld, dT))
        can_out = t.uncurried(0, (x, y), y)
        out[x, y] = can_out @ transport @ back @ can_in
    return out


def lemma_alpha(a: VCategory, t: Functor, phi: PairingIso, check: bool = True) -> LemmaAlpha:
    rep = validate_pairing(phi)
    if not rep.ok:
        raise InvalidInput(f"pairing rejected: {rep}")
    if phi.category is not t.category and not phi.category.same_data(t.category):
        raise StructureError("pairing and bifunctor over different categories")
    comps = alpha_components(t, phi)
    c = coend(t)
    e = end(t)
    fld = a.field
    total = Mat.vstack(
        fld,
        [Mat.hstack(fld, [comps[x, y] for (x,) in c.keys], rows=e.dim_at((y,))) for (y,) in e.keys],
        cols=c.total_dim,
    )
    # lands in the end and kills the coend relations exactly when alpha is dinatural
    lifted = end_map(e, total, check)
    induced = coend_map(c, Mat.identity(fld, e.dim), lifted, check)
    return LemmaAlpha(comps, induced, is_iso(induced), c, e)


def alpha_is_dinatural(t: Functor, comps: dict) -> bool:
    return dinatural_violations(t, t, comps).ok


# ---------------------------------------------------------------------------
# Yoneda, Fubini, distributivity


def coyoneda_reduce(m: Functor, w: str) -> tuple[Mat, Mat]:
    """``int^X A(W,X) (x) M(X) -> M(W)`` for contravariant ``M``, and its inverse.

    ``a (x) u |-> M(a) u``; the inverse sends ``u`` to the class of ``id_W (x) u``.
    """
    if m.variance != (CONTRA,):
        raise StructureError("coyoneda_reduce expects a contravariant functor")
    a = m.category
    fld = a.field
    integrand = tensor(representable(a, w), m)  # slots: X (co), X (contra)
    pres = coend_at(integrand, [(1, 0)])
    total = Mat.hstack(fld, [m.uncurried(0, (x,), w) for (x,) in pres.keys], rows=m.dim((w,)))
    iso = coend_map(pres, Mat.identity(fld, m.dim((w,))), total)
    inverse = pres.inject((w,)) @ kron(a.identity(w), Mat.identity(fld, m.dim((w,))))
    return iso, inverse


def coend_fubini(F: Functor, outer: tuple[int, int], inner: tuple[int, int], rest: tuple = ()) -> tuple[Mat, Mat]:
    """Iterated ``int^X int^Y`` versus simultaneous ``int^{X,Y}``, both directions.

    ``rest`` fixes any remaining slots, in slot order.
    """
    fld = F.field
    inner_f, inner_pres = coend_functor(F, [inner])
    # slots of inner_f: F's slots minus the inner pair, in order
    kept = [s for s in range(F.arity) if s not in inner]
    outer_new = (kept.index(outer[0]), kept.index(outer[1]))
    rest_slots = [s for s in kept if s not in outer]
    iterated = coend_at(inner_f, [outer_new], rest)
    simultaneous = coend_at(F, [outer, inner], rest)

    def inner_rest(x):
        r = [None] * len(kept)
        for s, o in zip(rest_slots, rest):
            r[kept.index(s)] = o
        r[outer_new[0]] = r[outer_new[1]] = x
        return tuple(r)

    fwd_cols = []
    for (x,) in iterated.keys:
        ip = inner_pres[inner_rest(x)]
        blocks = [simultaneous.embed((x, y)) @ ip.embed((y,)).T for (y,) in ip.keys]
        tot = blocks[0]
        for b in blocks[1:]:
            tot = tot + b
        fwd_cols.append(simultaneous.q.proj @ tot @ ip.q.section)
    fwd_total = Mat.hstack(fld, fwd_cols, rows=simultaneous.dim)
    forward = coend_map(iterated, Mat.identity(fld, simultaneous.dim), fwd_total)
    bwd_cols = []
    for x, y in simultaneous.keys:
        ip = inner_pres[inner_rest(x)]
        bwd_cols.append(iterated.inject((x,)) @ ip.inject((y,)))
    backward = coend_map(simultaneous, Mat.identity(fld, iterated.dim), Mat.hstack(fld, bwd_cols, rows=iterated.dim))
    return forward, backward


def _distribute_perm(fld: FieldSpec, n: int, dims: Sequence[int]) -> Mat:
    """``V (x) ((+)_k W_k) -> (+)_k (V (x) W_k)``."""
    total = sum(dims)
    offs = offsets(dims)
    perm = [0] * (n * total)
    for v in range(n):
        for k, d in enumerate(dims):
            for i in range(d):
                perm[v * total + offs[k] + i] = n * offs[k] + v * d + i
    return permutation_matrix(fld, perm)


def tensor_distribute(n: int, F: Functor, pair: tuple[int, int], rest: tuple = ()) -> tuple[Mat, Mat]:
    """``V (x) int^X F  ~=  int^X (V (x) F)`` with ``dim V = n``, both directions."""
    fld = F.field
    const = Functor(F.category, (), {(): n} if n else {}, {}, f"k^{n}")
    VF = tensor(const, F)
    p_F = coend_at(F, [pair], rest)
    p_VF = coend_at(VF, [pair], rest)
    eye = Mat.identity(fld, n)
    perm = _distribute_perm(fld, n, p_F.dims)
    forward = p_VF.q.proj @ perm @ kron(eye, p_F.q.section)
    # check the forward map is well defined on V (x) relations
    if not (p_VF.q.proj @ perm @ kron(eye, p_F.relations)).is_zero():
        raise ConsistencyError("distributivity map does not respect relations")
    backward = coend_map(p_VF, Mat.identity(fld, n * p_F.dim), kron(eye, p_F.q.proj) @ perm.T)
    return forward, backward


# ---------------------------------------------------------------------------
# reports


def verdict_report(a: VCategory, t: Functor, phi: PairingIso | None, emit_witness: bool = False) -> dict:
    inter = interchange(a, t)
    out = {
        "coend_dim": coend(t).dim,
        "end_dim": end(t).dim,
        "interchange_iso": inter.iso,
        "alpha_iso": None,
        "witness_rank": None,
    }
    if phi is not None:
        la = lemma_alpha(a, t, phi)
        out["alpha_iso"] = la.iso
        out["witness_rank"] = la.induced.rank()
        if emit_witness:
            out["witness"] = {
                "induced": mat_to_json(la.induced),
                "components": {f"{x}|{y}": mat_to_json(m) for (x, y), m in la.components.items()},
            }
    if emit_witness:
        out.setdefault("witness", {})["interchange"] = mat_to_json(inter.map)
    return out
