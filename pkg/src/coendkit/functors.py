"""V-functors of mixed variance, natural and dinatural families.

A :class:`Functor` has one slot per argument, each ``"co"`` or ``"contra"``.
Its action is stored per slot as one matrix per basis morphism:
``act[s, src, b]`` is a tuple of matrices ``F(src) -> F(tgt)`` where ``tgt``
is ``src`` with slot ``s`` replaced by ``b``, indexed by the basis of
``A(src[s], b)`` for a covariant slot and of ``A(b, src[s])`` for a
contravariant one.  Missing keys mean zero action.

``CoFunctor``, ``Bifunctor`` and ``TriFunctor`` are the variance patterns
``(co)``, ``(contra, co)`` and ``(contra, contra, co)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Sequence

from .linalg import Mat, kron
from .vcat import Report, StructureError, VCategory, pair_name

CO = "co"
CONTRA = "contra"


def _flip(v: str) -> str:
    return CONTRA if v == CO else CO


def _replace(t: tuple, s: int, x) -> tuple:
    return t[:s] + (x,) + t[s + 1:]


@dataclass(frozen=True, eq=False)
class Functor:
    category: VCategory
    variance: tuple[str, ...]
    dims: dict
    act: dict
    name: str = ""
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def arity(self) -> int:
        return len(self.variance)

    @property
    def field(self):
        return self.category.field

    def tuples(self):
        return product(self.category.objects, repeat=self.arity)

    def dim(self, objs: tuple) -> int:
        return self.dims.get(tuple(objs), 0)

    def morphism_hom(self, s: int, src: tuple, b: str) -> tuple[str, str]:
        return (src[s], b) if self.variance[s] == CO else (b, src[s])

    def blocks(self, s: int, src: tuple, b: str) -> tuple:
        src = tuple(src)
        got = self.act.get((s, src, b))
        if got is not None:
            return got
        x, y = self.morphism_hom(s, src, b)
        tgt = _replace(src, s, b)
        z = Mat.zeros(self.field, self.dim(tgt), self.dim(src))
        return tuple(z for _ in range(self.category.hom(x, y)))

    def action(self, s: int, src: tuple, b: str, morphism: Mat) -> Mat:
        """The matrix of ``F(..., morphism, ...)`` with source ``src``."""
        src = tuple(src)
        bl = self.blocks(s, src, b)
        out = Mat.zeros(self.field, self.dim(_replace(src, s, b)), self.dim(src))
        for m, blk in enumerate(bl):
            c = morphism[m, 0]
            if c != 0:
                out = out + blk.scale(c)
        return out

    def curried(self, s: int, src: tuple, b: str) -> Mat:
        """``F(src) -> hom* (x) F(tgt)``: the blocks stacked, morphism index slowest."""
        key = ("curried", s, tuple(src), b)
        if key not in self._cache:
            bl = self.blocks(s, src, b)
            self._cache[key] = Mat.vstack(self.field, list(bl), cols=self.dim(src))
        return self._cache[key]

    def uncurried(self, s: int, src: tuple, b: str) -> Mat:
        """``hom (x) F(src) -> F(tgt)``, morphism index slowest."""
        key = ("uncurried", s, tuple(src), b)
        if key not in self._cache:
            bl = self.blocks(s, src, b)
            self._cache[key] = Mat.hstack(self.field, list(bl), rows=self.dim(_replace(tuple(src), s, b)))
        return self._cache[key]


def CoFunctor(category: VCategory, dims: dict, act: dict, name: str = "") -> Functor:
    """Covariant functor; ``dims`` keyed by object, ``act`` by ``(X, X')``."""
    return Functor(category, (CO,), {(x,): d for x, d in dims.items()},
                   {(0, (x,), y): tuple(v) for (x, y), v in act.items()}, name)


def Bifunctor(category: VCategory, dims: dict, lact: dict, ract: dict, name: str = "") -> Functor:
    """``T: A^op (x) A -> V``; ``lact[X', X, Y]`` and ``ract[X, Y, Y']`` as tuples of blocks."""
    act = {(0, (x, y), x2): tuple(v) for (x2, x, y), v in lact.items()}
    act.update({(1, (x, y), y2): tuple(v) for (x, y, y2), v in ract.items()})
    return Functor(category, (CONTRA, CO), dict(dims), act, name)


def TriFunctor(category: VCategory, dims: dict, act: dict, name: str = "") -> Functor:
    return Functor(category, (CONTRA, CONTRA, CO), dict(dims), dict(act), name)


# ---------------------------------------------------------------------------
# validation


def _check_shapes(F: Functor) -> None:
    a = F.category
    if any(v not in (CO, CONTRA) for v in F.variance):
        raise StructureError(f"bad variance {F.variance}")
    objs = set(a.objects)
    for t, d in F.dims.items():
        if len(t) != F.arity or not set(t) <= objs or d < 0:
            raise StructureError(f"bad dimension entry {t}: {d}")
    for key, bl in F.act.items():
        s, src, b = key
        if not (0 <= s < F.arity) or len(src) != F.arity or not set(src) <= objs or b not in objs:
            raise StructureError(f"bad action key {key}")
        if bl and bl[0].field != a.field:
            raise StructureError(f"action {key} over {bl[0].field}, category over {a.field}")
        x, y = F.morphism_hom(s, src, b)
        if len(bl) != a.hom(x, y):
            raise StructureError(f"action {key} has {len(bl)} blocks, hom({x},{y}) has dim {a.hom(x, y)}")
        want = (F.dim(_replace(src, s, b)), F.dim(src))
        for m in bl:
            if m.shape != want:
                raise StructureError(f"action {key} block shape {m.shape}, expected {want}")


def validate_functor(F: Functor) -> Report:
    """Unit, composition and slot-commutation laws on all basis morphisms."""
    _check_shapes(F)
    a = F.category
    f = a.field
    rep = Report()
    objects = a.objects
    live = [t for t in F.tuples() if F.dim(t)]
    for s in range(F.arity):
        for src in live:
            x = src[s]
            ident = F.action(s, src, x, a.identity(x))
            if ident != Mat.identity(f, F.dim(src)):
                rep.add(f"slot {s}: identity of {x} does not act as identity on F{src}")
    for s in range(F.arity):
        co = F.variance[s] == CO
        for src in live:
            x = src[s]
            for b, c in product(objects, repeat=2):
                mid = _replace(src, s, b)
                tgt = _replace(src, s, c)
                if F.dim(tgt) == 0:
                    continue
                if co:
                    # f in A(x,b), g in A(b,c): F(g o f) = F(g) F(f)
                    df, dg = a.hom(x, b), a.hom(b, c)
                    first, second = F.blocks(s, src, b), F.blocks(s, mid, c)
                    comp = a.comp_mat(x, b, c)
                    for i, j in product(range(df), range(dg)):
                        col = comp.col_block(j * df + i, j * df + i + 1)
                        if F.action(s, src, c, col) != second[j] @ first[i]:
                            rep.add(f"slot {s}: composition fails at {src} via {b} to {c}, f#{i} g#{j}")
                else:
                    # f in A(b,x), g in A(c,b): F(f o g) = F(g) F(f)
                    df, dg = a.hom(b, x), a.hom(c, b)
                    first, second = F.blocks(s, src, b), F.blocks(s, mid, c)
                    comp = a.comp_mat(c, b, x)
                    for i, j in product(range(df), range(dg)):
                        col = comp.col_block(i * dg + j, i * dg + j + 1)
                        if F.action(s, src, c, col) != second[j] @ first[i]:
                            rep.add(f"slot {s}: composition fails at {src} via {b} to {c}, f#{i} g#{j}")
    for s, t in product(range(F.arity), repeat=2):
        if s >= t:
            continue
        for src in live:
            for b, c in product(objects, repeat=2):
                tgt = _replace(_replace(src, s, b), t, c)
                if F.dim(tgt) == 0:
                    continue
                via_s = _replace(src, s, b)
                via_t = _replace(src, t, c)
                bs1, bt1 = F.blocks(s, src, b), F.blocks(t, via_s, c)
                bt2, bs2 = F.blocks(t, src, c), F.blocks(s, via_t, b)
                for i, j in product(range(len(bs1)), range(len(bt1))):
                    if bt1[j] @ bs1[i] != bs2[i] @ bt2[j]:
                        rep.add(f"slots {s},{t}: actions do not commute at {src} -> {tgt}, #{i} #{j}")
    return rep


# ---------------------------------------------------------------------------
# constructors


def hom_bifunctor(a: VCategory) -> Functor:
    """``A(-,-)``: precomposition in the first slot, postcomposition in the second."""
    dims = {(x, y): a.hom(x, y) for x, y in product(a.objects, repeat=2)}
    act = {}
    for x, y, z in product(a.objects, repeat=3):
        if a.hom(x, y) and a.hom(y, z):
            # f in A(x,y) acting on A(y,z) by precomposition: slot 0, src (y,z) -> (x,z)
            act[0, (y, z), x] = tuple(a.pre(x, y, z))
            # g in A(y,z) acting on A(x,y) by postcomposition: slot 1, src (x,y) -> (x,z)
            act[1, (x, y), z] = tuple(a.post(x, y, z))
    return Functor(a, (CONTRA, CO), dims, act, "hom")


def representable(a: VCategory, w: str) -> Functor:
    """``A(w, -)`` as a covariant functor."""
    dims = {(x,): a.hom(w, x) for x in a.objects}
    act = {(0, (x,), y): tuple(a.post(w, x, y)) for x, y in product(a.objects, repeat=2) if a.hom(w, x) and a.hom(x, y)}
    return Functor(a, (CO,), dims, act, f"A({w},-)")


def corepresentable(a: VCategory, w: str) -> Functor:
    """``A(-, w)`` as a contravariant functor."""
    dims = {(x,): a.hom(x, w) for x in a.objects}
    act = {(0, (x,), y): tuple(a.pre(y, x, w)) for x, y in product(a.objects, repeat=2) if a.hom(x, w) and a.hom(y, x)}
    return Functor(a, (CONTRA,), dims, act, f"A(-,{w})")


def constant(a: VCategory, n: int, augmentation: dict | None = None) -> Functor:
    """The functor ``k^n`` with ``f`` acting as ``epsilon(f) * I``.

    ``augmentation[x, y]`` is a row of scalars on the basis of ``A(x,y)``;
    by default every basis morphism maps to 1 (right for linearized groupoids
    and for the unit category).
    """
    f = a.field
    dims = {(x,): n for x in a.objects}
    act = {}
    for x, y in product(a.objects, repeat=2):
        d = a.hom(x, y)
        if d == 0 or n == 0:
            continue
        eps = augmentation[x, y] if augmentation else [1] * d
        act[0, (x,), y] = tuple(Mat.identity(f, n).scale(e) for e in eps)
    return Functor(a, (CO,), dims, act, f"k^{n}")


def from_representation(a: VCategory, rep: dict, dims: dict) -> Functor:
    """Covariant functor from matrices ``rep[name]`` of each groupoid basis morphism."""
    g = a.groupoid
    if g is None:
        raise StructureError("from_representation needs a linearized groupoid")
    act = {}
    for x, y in product(a.objects, repeat=2):
        ms = g.hom[x, y]
        if ms:
            act[0, (x,), y] = tuple(rep[m] for m in ms)
    return Functor(a, (CO,), {(x,): dims[x] for x in a.objects}, act)


def pointwise_dual(F: Functor) -> Functor:
    """``F*``: every slot's variance flips, action blocks transpose."""
    act = {}
    for (s, src, b), bl in F.act.items():
        tgt = _replace(src, s, b)
        act[s, tgt, src[s]] = tuple(m.T for m in bl)
    return Functor(F.category, tuple(_flip(v) for v in F.variance), dict(F.dims), act, f"({F.name})*")


def tensor(F: Functor, G: Functor) -> Functor:
    """Pointwise ``F (x) G`` with the slots of ``F`` followed by those of ``G``."""
    if F.category is not G.category and not F.category.same_data(G.category):
        raise StructureError("tensor of functors over different categories")
    f = F.field
    nf = F.arity
    dims = {}
    for s, ds in F.dims.items():
        if ds == 0:
            continue
        for t, dt in G.dims.items():
            if dt:
                dims[s + t] = ds * dt
    act = {}
    for (s, src, b), bl in F.act.items():
        for t, dt in G.dims.items():
            if dt == 0 or not bl:
                continue
            eye = Mat.identity(f, dt)
            act[s, src + t, b] = tuple(kron(m, eye) for m in bl)
    for (s, src, b), bl in G.act.items():
        for t, dt in F.dims.items():
            if dt == 0 or not bl:
                continue
            eye = Mat.identity(f, dt)
            act[nf + s, t + src, b] = tuple(kron(eye, m) for m in bl)
    return Functor(F.category, F.variance + G.variance, dims, act, f"{F.name}(x){G.name}")


def tensor_all(fs: Sequence[Functor]) -> Functor:
    out = fs[0]
    for g in fs[1:]:
        out = tensor(out, g)
    return out


def direct_sum(F: Functor, G: Functor) -> Functor:
    if F.variance != G.variance:
        raise StructureError("direct sum of functors with different variance")
    f = F.field
    dims = {t: F.dim(t) + G.dim(t) for t in F.tuples() if F.dim(t) + G.dim(t)}
    act = {}
    for key in set(F.act) | set(G.act):
        s, src, b = key
        fb, gb = F.blocks(s, src, b), G.blocks(s, src, b)
        act[key] = tuple(Mat.block_diag(f, [x, y]) for x, y in zip(fb, gb))
    return Functor(F.category, F.variance, dims, act, f"{F.name}(+){G.name}")


def fix_slot(F: Functor, slot: int, obj: str) -> Functor:
    """Restrict slot ``slot`` to the object ``obj`` and drop it."""

    def drop(t):
        return t[:slot] + t[slot + 1:]

    dims = {drop(t): d for t, d in F.dims.items() if t[slot] == obj and d}
    act = {}
    for (s, src, b), bl in F.act.items():
        if s == slot or src[slot] != obj:
            continue
        act[s - (s > slot), drop(src), b] = bl
    return Functor(F.category, drop(F.variance), dims, act, f"{F.name}[{slot}={obj}]")


def permute_slots(F: Functor, order: Sequence[int]) -> Functor:
    """New slot ``k`` is old slot ``order[k]``."""
    order = list(order)
    inv = {old: new for new, old in enumerate(order)}

    def re(t):
        return tuple(t[o] for o in order)

    dims = {re(t): d for t, d in F.dims.items()}
    act = {(inv[s], re(src), b): bl for (s, src, b), bl in F.act.items()}
    return Functor(F.category, tuple(F.variance[o] for o in order), dims, act, F.name)


def to_product_category(F: Functor, product_cat: VCategory, groups: Sequence[Sequence[int]]) -> Functor:
    """Regroup pairs of slots of ``F`` (over ``A``) into single slots over ``A (x) A``.

    ``groups[k] = (s1, s2)`` makes new slot ``k`` from old slots ``s1`` and
    ``s2``, which must share variance.  ``product_cat`` must be
    ``tensor_categories(A, A)``.
    """
    a = F.category
    groups = [tuple(g) for g in groups]
    used = sorted(s for g in groups for s in g)
    if used != list(range(F.arity)) or any(len(g) != 2 for g in groups):
        raise StructureError(f"slot groups {groups} must pair up all {F.arity} slots")
    variance = []
    for s1, s2 in groups:
        if F.variance[s1] != F.variance[s2]:
            raise StructureError(f"slots {s1},{s2} have different variance")
        variance.append(F.variance[s1])
    fac = product_cat.factors
    inv = {v: k for k, v in fac.items()}

    def old_tuple(new):
        old = [None] * F.arity
        for k, (s1, s2) in enumerate(groups):
            old[s1], old[s2] = fac[new[k]]
        return tuple(old)

    def new_tuple(old):
        return tuple(inv[old[s1], old[s2]] for s1, s2 in groups)

    dims = {new_tuple(t): d for t, d in F.dims.items() if d}
    act = {}
    for k, (s1, s2) in enumerate(groups):
        for new_src, d in list(dims.items()):
            src = old_tuple(new_src)
            for b1, b2 in product(a.objects, repeat=2):
                mid = _replace(src, s1, b1)
                tgt = _replace(mid, s2, b2)
                if F.dim(tgt) == 0:
                    continue
                first = F.blocks(s1, src, b1)
                second = F.blocks(s2, mid, b2)
                if not first or not second:
                    continue
                act[k, new_src, inv[b1, b2]] = tuple(y @ x for x in first for y in second)
    return Functor(product_cat, tuple(variance), dims, act, F.name)


# ---------------------------------------------------------------------------
# natural and dinatural families


@dataclass(frozen=True, eq=False)
class NatFamily:
    """Components ``comp[objs]: source(objs) -> target(objs)``."""

    source: Functor
    target: Functor
    comp: dict
    name: str = ""

    def at(self, objs) -> Mat:
        objs = tuple(objs)
        m = self.comp.get(objs)
        if m is None:
            return Mat.zeros(self.source.field, self.target.dim(objs), self.source.dim(objs))
        return m


def check_natural(n: NatFamily) -> bool:
    return not natural_violations(n).violations


def natural_violations(n: NatFamily) -> Report:
    S, T = n.source, n.target
    if S.variance != T.variance:
        raise StructureError(f"variance mismatch {S.variance} vs {T.variance}")
    rep = Report()
    for objs in S.tuples():
        m = n.at(objs)
        if m.shape != (T.dim(objs), S.dim(objs)):
            raise StructureError(f"component {objs} has shape {m.shape}")
    for s in range(S.arity):
        for src in S.tuples():
            if S.dim(src) == 0 and T.dim(src) == 0:
                continue
            for b in S.category.objects:
                tgt = _replace(src, s, b)
                sb, tb = S.blocks(s, src, b), T.blocks(s, src, b)
                for k, (x, y) in enumerate(zip(sb, tb)):
                    if y @ n.at(src) != n.at(tgt) @ x:
                        rep.add(f"naturality fails in slot {s} at {src} -> {tgt}, basis #{k}")
    return rep


def is_natural_iso(n: NatFamily) -> Report:
    rep = natural_violations(n)
    for objs in set(n.source.dims) | set(n.target.dims):
        m = n.at(objs)
        if m.rows != m.cols or m.rank() != m.rows:
            rep.add(f"component {objs} not invertible")
    return rep


def check_dinatural(source: Functor, target: Functor, family: dict) -> bool:
    return not dinatural_violations(source, target, family).violations


def dinatural_violations(source: Functor, target: Functor, family: dict) -> Report:
    """Family ``family[X, Y]: source(X,X) -> target(Y,Y)`` of two bifunctors.

    In X, for ``f in A(X,X')``: ``alpha_{X,Y} source(f,1) = alpha_{X',Y} source(1,f)``.
    In Y, for ``g in A(Y,Y')``: ``target(1,g) alpha_{X,Y} = target(g,1) alpha_{X,Y'}``.
    """
    a = source.category
    fld = a.field
    rep = Report()

    def alpha(x, y):
        m = family.get((x, y))
        if m is None:
            return Mat.zeros(fld, target.dim((y, y)), source.dim((x, x)))
        return m

    for y in a.objects:
        for x, x2 in product(a.objects, repeat=2):
            # source(X',X) --source(f,1)--> source(X,X);  --source(1,f)--> source(X',X')
            left = source.blocks(0, (x2, x), x)  # f in A(x, x2) acting contravariantly
            right = source.blocks(1, (x2, x), x2)  # f in A(x, x2) acting covariantly
            for k, (l, r) in enumerate(zip(left, right)):
                if alpha(x, y) @ l != alpha(x2, y) @ r:
                    rep.add(f"dinaturality in X fails at X={x} X'={x2} Y={y} f#{k}")
    for x in a.objects:
        for y, y2 in product(a.objects, repeat=2):
            up = target.blocks(1, (y, y), y2)  # g in A(y, y2): target(Y,Y) -> target(Y,Y')
            down = target.blocks(0, (y2, y2), y)  # g in A(y, y2): target(Y',Y') -> target(Y,Y')
            for k, (u, d) in enumerate(zip(up, down)):
                if u @ alpha(x, y) != d @ alpha(x, y2):
                    rep.add(f"dinaturality in Y fails at X={x} Y={y} Y'={y2} g#{k}")
    return rep


def build_closure_integrand(g: Functor, h: Functor, p: Functor, a_obj: str, product_cat: VCategory) -> Functor:
    """``U((B,C), (B',C')) = G(B)* (x) p(a_obj, B', C)* (x) H(C')`` over ``A (x) A``.

    The diagonal at ``(B, C)`` is ``G(B)* (x) p(a_obj,B,C)* (x) H(C)``.
    """
    if a_obj not in g.category.objects:
        raise StructureError(f"object {a_obj!r} not in the category")
    if g.variance != (CO,) or h.variance != (CO,) or p.variance != (CONTRA, CONTRA, CO):
        raise StructureError("closure integrand needs covariant G, H and p of variance (contra, contra, co)")
    pa = fix_slot(pointwise_dual(p), 0, a_obj)  # slots: B (co), C (contra)
    flat = tensor_all([pointwise_dual(g), pa, h])  # B-, B'+, C-, C'+
    out = to_product_category(flat, product_cat, [(0, 2), (1, 3)])
    return Functor(product_cat, out.variance, out.dims, out.act, f"U[{a_obj}]")


def same_functor_data(F: Functor, G: Functor) -> bool:
    """Equal variance, nonzero dims and action blocks on every generating morphism."""
    if F.variance != G.variance or F.category.objects != G.category.objects:
        return False
    if {k: v for k, v in F.dims.items() if v} != {k: v for k, v in G.dims.items() if v}:
        return False
    return all(
        F.blocks(s, t, b) == G.blocks(s, t, b)
        for t in F.tuples() for s in range(F.arity) for b in F.category.objects
    )


def dims_table(F: Functor) -> dict:
    return {t: F.dim(t) for t in F.tuples()}


def relabel_pairs(t: tuple) -> tuple:
    return tuple(pair_name(*x) if isinstance(x, tuple) else x for x in t)
