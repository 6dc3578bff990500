"""Finite Vect_k-enriched categories and self-duality pairings on their homs.

Composition convention: ``comp[X, Y, Z]`` is the matrix of
``A(Y,Z) (x) A(X,Y) -> A(X,Z)``, ``g (x) f |-> g o f``.  Its column
``j * dim A(X,Y) + i`` holds ``g_j o f_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Sequence

from .groups import FiniteGroup
from .linalg import FieldSpec, Mat, kron, pivot_columns, tensor_permutation


class StructureError(ValueError):
    """Malformed data: wrong shapes, unknown objects, broken tables."""


@dataclass
class Report:
    """Outcome of a validator: ``ok`` iff no violations were recorded."""

    violations: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str) -> None:
        self.violations.append(msg)

    def extend(self, other: "Report", prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else "; ".join(self.violations)


def pair_name(x: str, y: str) -> str:
    return f"({x},{y})"


@dataclass(frozen=True)
class GroupoidSpec:
    """A finite groupoid by explicit tables.  Morphism names are global."""

    objects: tuple[str, ...]
    hom: dict  # (X, Y) -> tuple of morphism names X -> Y
    compose: dict  # (g, f) -> g o f
    identities: dict  # X -> name
    inverse: dict  # name -> name

    def source_target(self) -> dict:
        return {m: (x, y) for (x, y), ms in self.hom.items() for m in ms}

    def check(self) -> None:
        st = self.source_target()
        if len(st) != sum(len(v) for v in self.hom.values()):
            raise StructureError("morphism names are not unique")
        for x in self.objects:
            idx = self.identities.get(x)
            if st.get(idx) != (x, x):
                raise StructureError(f"identity of {x} missing")
        for g, (y, z) in st.items():
            for f, (x, y2) in st.items():
                if y2 != y:
                    continue
                h = self.compose.get((g, f))
                if h is None or st.get(h) != (x, z):
                    raise StructureError(f"composite {g} o {f} missing or misplaced")
        for f, (x, y) in st.items():
            if self.compose[self.identities[y], f] != f or self.compose[f, self.identities[x]] != f:
                raise StructureError(f"unit law fails at {f}")
            fi = self.inverse.get(f)
            if st.get(fi) != (y, x) or self.compose[fi, f] != self.identities[x] or self.compose[f, fi] != self.identities[y]:
                raise StructureError(f"inverse of {f} wrong")
        for h, (z, w) in st.items():
            for g, (y, z2) in st.items():
                if z2 != z:
                    continue
                for f, (x, y2) in st.items():
                    if y2 != y:
                        continue
                    if self.compose[self.compose[h, g], f] != self.compose[h, self.compose[g, f]]:
                        raise StructureError(f"associativity fails at {h},{g},{f}")

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "hom": {f"{x}|{y}": list(ms) for (x, y), ms in self.hom.items()},
            "compose": [[g, f, h] for (g, f), h in self.compose.items()],
            "identities": dict(self.identities),
            "inverse": dict(self.inverse),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GroupoidSpec":
        try:
            hom = {tuple(k.split("|")): tuple(v) for k, v in doc["hom"].items()}
            return cls(
                tuple(doc["objects"]), hom, {(g, f): h for g, f, h in doc["compose"]},
                dict(doc["identities"]), dict(doc["inverse"]),
            )
        except (KeyError, ValueError, TypeError) as e:
            raise StructureError(f"bad groupoid document: {e}") from e


def connected_groupoid(objects: Sequence[str], group: FiniteGroup, tag: str = "") -> GroupoidSpec:
    """``objects`` all isomorphic, each with automorphism group ``group``.

    The morphism ``Y<g<X`` composes as ``(Z<h<Y) o (Y<g<X) = Z<hg<X``.
    """
    objects = tuple(objects)

    def name(y, g, x):
        return f"{y}<{g}<{x}{tag}"

    hom = {(x, y): tuple(name(y, g, x) for g in group.elements) for x in objects for y in objects}
    compose = {}
    for x, y, z in product(objects, repeat=3):
        for g in group.elements:
            for h in group.elements:
                compose[name(z, h, y), name(y, g, x)] = name(z, group.mul(h, g), x)
    identities = {x: name(x, group.identity, x) for x in objects}
    inverse = {name(y, g, x): name(x, group.inv(g), y) for x in objects for y in objects for g in group.elements}
    return GroupoidSpec(objects, hom, compose, identities, inverse)


def disjoint_union(parts: Sequence[GroupoidSpec]) -> GroupoidSpec:
    objects = tuple(o for p in parts for o in p.objects)
    if len(set(objects)) != len(objects):
        raise StructureError("object names collide")
    hom = {(x, y): () for x in objects for y in objects}
    compose, identities, inverse = {}, {}, {}
    for p in parts:
        hom.update(p.hom)
        compose.update(p.compose)
        identities.update(p.identities)
        inverse.update(p.inverse)
    return GroupoidSpec(objects, hom, compose, identities, inverse)


@dataclass(frozen=True, eq=False)
class VCategory:
    """A finite Vect_k-category.

    ``hom_dim`` lists every ordered pair; ``comp`` may omit triples whose
    composite space is trivially zero.  ``groupoid`` is set when the
    category is a linearized groupoid (basis of ``A(X,Y)`` = ``groupoid.hom[X,Y]``);
    ``factors`` is set on tensor products of categories.
    """

    field: FieldSpec
    objects: tuple[str, ...]
    hom_dim: dict
    comp: dict
    ids: dict
    groupoid: GroupoidSpec | None = None
    factors: dict | None = None
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def hom(self, x: str, y: str) -> int:
        try:
            return self.hom_dim[x, y]
        except KeyError:
            raise StructureError(f"no hom ({x},{y})") from None

    def comp_mat(self, x: str, y: str, z: str) -> Mat:
        m = self.comp.get((x, y, z))
        if m is None:
            return Mat.zeros(self.field, self.hom(x, z), self.hom(y, z) * self.hom(x, y))
        return m

    def identity(self, x: str) -> Mat:
        return self.ids[x]

    def compose(self, g: Mat, f: Mat, x: str, y: str, z: str) -> Mat:
        """``g o f`` for column vectors ``f`` in A(x,y), ``g`` in A(y,z)."""
        return self.comp_mat(x, y, z) @ kron(g, f)

    def post(self, x: str, y: str, z: str) -> list[Mat]:
        """Matrices of ``g_j o - : A(x,y) -> A(x,z)``, one per basis ``g_j`` of A(y,z)."""
        key = ("post", x, y, z)
        if key not in self._cache:
            c = self.comp_mat(x, y, z)
            dxy = self.hom(x, y)
            self._cache[key] = [c.col_block(j * dxy, (j + 1) * dxy) for j in range(self.hom(y, z))]
        return self._cache[key]

    def pre(self, x: str, y: str, z: str) -> list[Mat]:
        """Matrices of ``- o f_i : A(y,z) -> A(x,z)``, one per basis ``f_i`` of A(x,y)."""
        key = ("pre", x, y, z)
        if key not in self._cache:
            c = self.comp_mat(x, y, z)
            dxy, dyz = self.hom(x, y), self.hom(y, z)
            self._cache[key] = [c.submatrix(range(c.rows), [j * dxy + i for j in range(dyz)]) for i in range(dxy)]
        return self._cache[key]

    def generators(self, x: str, y: str) -> tuple[int, ...]:
        """Basis indices of A(x, y) in a generating set of the whole category.

        Every morphism is a linear combination of composites of identities and
        generators, so (co)end relations only need to be imposed on generators.
        Chosen greedily in object and basis order.
        """
        if "generators" not in self._cache:
            self._cache["generators"] = _greedy_generators(self)
        return self._cache["generators"].get((x, y), ())

    def basis_labels(self, x: str, y: str) -> tuple[str, ...]:
        if self.groupoid is not None:
            return self.groupoid.hom[x, y]
        return tuple(f"{x}>{y}#{i}" for i in range(self.hom(x, y)))

    def same_data(self, other: "VCategory") -> bool:
        if self.field != other.field or self.objects != other.objects or self.hom_dim != other.hom_dim:
            return False
        for x, y, z in product(self.objects, repeat=3):
            if self.comp_mat(x, y, z) != other.comp_mat(x, y, z):
                return False
        return all(self.ids[x] == other.ids[x] for x in self.objects)


def _greedy_generators(a: VCategory) -> dict:
    f = a.field
    pairs = list(product(a.objects, repeat=2))
    span = {p: Mat.zeros(f, a.hom(*p), 0) for p in pairs}

    def extend(p, vecs: Mat) -> bool:
        both = Mat.hstack(f, [span[p], vecs], rows=a.hom(*p))
        r = both.rank()
        if r == span[p].cols:
            return False
        cols = [both.submatrix(range(both.rows), [j]) for j in pivot_columns(both)]
        span[p] = Mat.hstack(f, cols, rows=a.hom(*p))
        return True

    def close():
        changed = True
        while changed:
            changed = False
            for x, y, z in product(a.objects, repeat=3):
                u, v = span[y, z], span[x, y]
                if u.cols and v.cols:
                    if extend((x, z), a.comp_mat(x, y, z) @ kron(u, v)):
                        changed = True

    for x in a.objects:
        if a.hom(x, x):
            extend((x, x), a.identity(x))
    close()
    gens = {}
    for p in pairs:
        for k in range(a.hom(*p)):
            if span[p].cols == a.hom(*p):
                break
            if extend(p, Mat.unit_vector(f, a.hom(*p), k)):
                gens.setdefault(p, []).append(k)
                close()
    return {p: tuple(ks) for p, ks in gens.items()}


def _check_shapes(a: VCategory) -> None:
    objs = set(a.objects)
    if len(objs) != len(a.objects):
        raise StructureError("duplicate object ids")
    for x, y in product(a.objects, repeat=2):
        if (x, y) not in a.hom_dim or a.hom_dim[x, y] < 0:
            raise StructureError(f"hom dimension ({x},{y}) missing")
    for key, m in a.comp.items():
        if len(key) != 3 or not set(key) <= objs:
            raise StructureError(f"composition key {key} names unknown objects")
        x, y, z = key
        want = (a.hom(x, z), a.hom(y, z) * a.hom(x, y))
        if m.shape != want:
            raise StructureError(f"comp{key} has shape {m.shape}, expected {want}")
        if m.field != a.field:
            raise StructureError(f"comp{key} over {m.field}, category over {a.field}")
    for x in a.objects:
        v = a.ids.get(x)
        if v is None or v.shape != (a.hom(x, x), 1):
            raise StructureError(f"identity vector of {x} missing or misshapen")


def validate_category(a: VCategory) -> Report:
    """Associativity and unit laws on all basis triples.

    Raises :class:`StructureError` on dimension mismatches.
    """
    _check_shapes(a)
    rep = Report()
    f = a.field
    for x, y in product(a.objects, repeat=2):
        d = a.hom(x, y)
        if d == 0:
            continue
        eye = Mat.identity(f, d)
        right = a.comp_mat(x, x, y) @ kron(eye, a.identity(x))
        if right != eye:
            j = _first_bad_column(right, eye)
            rep.add(f"right unit fails at {x}->{y} basis {j}: {right.col_block(j, j + 1).flat()} != {eye.col_block(j, j + 1).flat()}")
        left = a.comp_mat(x, y, y) @ kron(a.identity(y), eye)
        if left != eye:
            j = _first_bad_column(left, eye)
            rep.add(f"left unit fails at {x}->{y} basis {j}: {left.col_block(j, j + 1).flat()} != {eye.col_block(j, j + 1).flat()}")
    for x, y, z, w in product(a.objects, repeat=4):
        dxy, dyz, dzw = a.hom(x, y), a.hom(y, z), a.hom(z, w)
        if dxy * dyz * dzw == 0:
            continue
        # (h o g) o f  vs  h o (g o f), on A(z,w) (x) A(y,z) (x) A(x,y)
        lhs = a.comp_mat(x, y, w) @ kron(a.comp_mat(y, z, w), Mat.identity(f, dxy))
        rhs = a.comp_mat(x, z, w) @ kron(Mat.identity(f, dzw), a.comp_mat(x, y, z))
        if lhs != rhs:
            c = _first_bad_column(lhs, rhs)
            l, rest = divmod(c, dyz * dxy)
            j, i = divmod(rest, dxy)
            rep.add(
                f"associativity fails at ({x},{y},{z},{w}) basis h{l} g{j} f{i}: "
                f"{lhs.col_block(c, c + 1).flat()} != {rhs.col_block(c, c + 1).flat()}"
            )
    return rep


def _first_bad_column(a: Mat, b: Mat) -> int:
    la, lb = a.tolist(), b.tolist()
    for j in range(a.cols):
        if any(la[i][j] != lb[i][j] for i in range(a.rows)):
            return j
    return -1


def linearize_groupoid(g: GroupoidSpec, f: FieldSpec) -> VCategory:
    g.check()
    hom_dim = {(x, y): len(g.hom[x, y]) for x in g.objects for y in g.objects}
    index = {m: (k, x, y) for (x, y), ms in g.hom.items() for k, m in enumerate(ms)}
    comp = {}
    for x, y, z in product(g.objects, repeat=3):
        dxy, dyz, dxz = hom_dim[x, y], hom_dim[y, z], hom_dim[x, z]
        if dxy * dyz == 0:
            continue
        entries = []
        for j, gm in enumerate(g.hom[y, z]):
            for i, fm in enumerate(g.hom[x, y]):
                k = index[g.compose[gm, fm]][0]
                entries.append((k, j * dxy + i, 1))
        comp[x, y, z] = Mat.from_entries(f, dxz, dyz * dxy, entries)
    ids = {x: Mat.unit_vector(f, hom_dim[x, x], index[g.identities[x]][0]) for x in g.objects}
    return VCategory(f, tuple(g.objects), hom_dim, comp, ids, groupoid=g)


def algebra_as_one_object(dim: int, mult: Mat, unit: Mat, f: FieldSpec, obj: str = "*") -> VCategory:
    """One-object category on an algebra; ``mult`` column ``j*dim+i`` is ``e_j e_i``."""
    return VCategory(f, (obj,), {(obj, obj): dim}, {(obj, obj, obj): mult}, {obj: unit})


def group_algebra(group: FiniteGroup, f: FieldSpec) -> VCategory:
    """k[G] as the one-object category; same data as linearizing G as a groupoid."""
    return linearize_groupoid(connected_groupoid(["*"], group), f)


def matrix_algebra(n: int, f: FieldSpec) -> VCategory:
    """M_n(k) on matrix units ``E_ab`` at index ``a*n + b``."""
    d = n * n
    entries = []
    for (a, b), (c, e) in product(product(range(n), repeat=2), repeat=2):
        # E_ab E_ce = [b == c] E_ae ; column index (j=ab)*d + (i=ce)
        if b == c:
            entries.append((a * n + e, (a * n + b) * d + (c * n + e), 1))
    mult = Mat.from_entries(f, d, d * d, entries)
    unit = Mat.from_entries(f, d, 1, [(a * n + a, 0, 1) for a in range(n)])
    return algebra_as_one_object(d, mult, unit, f)


def unit_category(f: FieldSpec) -> VCategory:
    return algebra_as_one_object(1, Mat.identity(f, 1), Mat.identity(f, 1), f)


def tensor_categories(a: VCategory, b: VCategory) -> VCategory:
    if a.field != b.field:
        raise StructureError(f"field mismatch {a.field} vs {b.field}")
    f = a.field
    pairs = [(x, y) for x in a.objects for y in b.objects]
    names = {p: pair_name(*p) for p in pairs}
    hom_dim = {(names[p], names[q]): a.hom(p[0], q[0]) * b.hom(p[1], q[1]) for p in pairs for q in pairs}
    comp = {}
    for p, q, r in product(pairs, repeat=3):
        da = (a.hom(q[0], r[0]), a.hom(p[0], q[0]))
        db = (b.hom(q[1], r[1]), b.hom(p[1], q[1]))
        if da[0] * da[1] * db[0] * db[1] == 0:
            continue
        # A(q,r) (x) B(q,r) (x) A(p,q) (x) B(p,q) -> A(q,r) (x) A(p,q) (x) B(q,r) (x) B(p,q)
        swap = tensor_permutation(f, [da[0], db[0], da[1], db[1]], [0, 2, 1, 3])
        comp[names[p], names[q], names[r]] = kron(a.comp_mat(p[0], q[0], r[0]), b.comp_mat(p[1], q[1], r[1])) @ swap
    ids = {names[p]: kron(a.identity(p[0]), b.identity(p[1])) for p in pairs}
    return VCategory(f, tuple(names[p] for p in pairs), hom_dim, comp, ids, factors={names[p]: p for p in pairs})


def opposite(a: VCategory) -> VCategory:
    f = a.field
    hom_dim = {(x, y): a.hom(y, x) for x, y in product(a.objects, repeat=2)}
    comp = {}
    for x, y, z in product(a.objects, repeat=3):
        # op: A(z,y) (x) A(y,x) -> A(z,x),  g (x) f |-> f o g
        dzy, dyx = a.hom(z, y), a.hom(y, x)
        if dzy * dyx == 0:
            continue
        comp[x, y, z] = a.comp_mat(z, y, x) @ tensor_permutation(f, [dzy, dyx], [1, 0])
    return VCategory(f, a.objects, hom_dim, comp, dict(a.ids))


def full_subcategory(a: VCategory, objects: Sequence[str]) -> VCategory:
    objects = tuple(objects)
    missing = set(objects) - set(a.objects)
    if missing:
        raise StructureError(f"unknown objects {sorted(missing)}")
    hom_dim = {(x, y): a.hom(x, y) for x, y in product(objects, repeat=2)}
    comp = {k: m for k, m in a.comp.items() if set(k) <= set(objects)}
    g = a.groupoid
    if g is not None:
        keep = {m for x, y in product(objects, repeat=2) for m in g.hom[x, y]}
        g = GroupoidSpec(
            objects, {(x, y): g.hom[x, y] for x, y in product(objects, repeat=2)},
            {k: v for k, v in g.compose.items() if k[0] in keep and k[1] in keep},
            {x: g.identities[x] for x in objects}, {m: g.inverse[m] for m in keep},
        )
    return VCategory(a.field, objects, hom_dim, comp, {x: a.ids[x] for x in objects}, groupoid=g)


# ---------------------------------------------------------------------------
# pairings


@dataclass(frozen=True, eq=False)
class PairingIso:
    """A choice of iso ``phi[X,Y]: A(Y,X) -> A(X,Y)*``.

    The associated form is ``beta_{X,Y}(a, b) = b^T phi[X,Y] a``.
    """

    category: VCategory
    phi: dict

    def beta(self, x: str, y: str, a: Mat, b: Mat):
        return (b.T @ self.phi[x, y] @ a)[0, 0]

    def inverse(self, x: str, y: str) -> Mat:
        return self.phi[x, y].inverse()


def validate_pairing(pa: PairingIso) -> Report:
    """Invertibility plus the two balance laws.

    B1: beta_{X,Y'}(a o h, b) = beta_{X,Y}(a, h o b)
    B2: beta_{X',Y}(u o a, b) = beta_{X,Y}(a, b o u)
    Both are checked as matrix identities over each basis morphism h, u.
    """
    a = pa.category
    rep = Report()
    for x, y in product(a.objects, repeat=2):
        m = pa.phi.get((x, y))
        want = (a.hom(x, y), a.hom(y, x))
        if m is None or m.shape != want:
            raise StructureError(f"phi({x},{y}) missing or not {want}")
        if m.rows != m.cols or m.rank() != m.rows:
            rep.add(f"phi({x},{y}) not invertible")
    for x, y, y2 in product(a.objects, repeat=3):
        # h in A(y2, y); a in A(y, x); b in A(x, y2)
        pres = a.pre(y2, y, x)  # - o h : A(y,x) -> A(y2,x)
        posts = a.post(x, y2, y)  # h o - : A(x,y2) -> A(x,y)
        for k, (p, q) in enumerate(zip(pres, posts)):
            if pa.phi[x, y2] @ p != q.T @ pa.phi[x, y]:
                rep.add(f"balance B1 fails at X={x} Y={y} Y'={y2} h#{k}")
    for x, x2, y in product(a.objects, repeat=3):
        # u in A(x, x2); a in A(y, x); b in A(x2, y)
        posts = a.post(y, x, x2)  # u o - : A(y,x) -> A(y,x2)
        pres = a.pre(x, x2, y)  # - o u : A(x2,y) -> A(x,y)
        for k, (l, r) in enumerate(zip(posts, pres)):
            if pa.phi[x2, y] @ l != r.T @ pa.phi[x, y]:
                rep.add(f"balance B2 fails at X={x} X'={x2} Y={y} u#{k}")
    return rep


def delta_pairing(a: VCategory) -> PairingIso:
    """``beta(g, h) = 1`` iff ``h = g^-1``, on a linearized groupoid."""
    g = a.groupoid
    if g is None:
        raise StructureError("delta_pairing needs a linearized groupoid")
    phi = {}
    for x, y in product(a.objects, repeat=2):
        src = g.hom[y, x]
        tgt = g.hom[x, y]
        pos = {m: k for k, m in enumerate(tgt)}
        phi[x, y] = Mat.from_entries(a.field, len(tgt), len(src), [(pos[g.inverse[m]], i, 1) for i, m in enumerate(src)])
    return PairingIso(a, phi)


def form_pairing(a: VCategory, eps: dict) -> PairingIso:
    """``phi(g)(f) = eps_X(g o f)`` for ``f in A(X,Y)``, ``g in A(Y,X)``.

    ``eps[X]`` is a ``1 x dim A(X,X)`` row.  The trace on a matrix algebra
    gives a valid pairing; whether a given form does is left to the validator.
    """
    phi = {}
    for x, y in product(a.objects, repeat=2):
        dxy, dyx = a.hom(x, y), a.hom(y, x)
        if dxy * dyx == 0:
            phi[x, y] = Mat.zeros(a.field, dxy, dyx)
            continue
        # comp(x, y, x) column j*dxy + i is g_j o f_i
        vals = eps[x] @ a.comp_mat(x, y, x)
        phi[x, y] = Mat.from_entries(
            a.field, dxy, dyx, [(i, j, vals[0, j * dxy + i]) for j in range(dyx) for i in range(dxy)]
        )
    return PairingIso(a, phi)


def trace_pairing(n: int, f: FieldSpec) -> PairingIso:
    """The trace form on ``matrix_algebra(n, f)``."""
    a = matrix_algebra(n, f)
    return form_pairing(a, {"*": Mat.from_entries(f, 1, n * n, [(0, i * n + i, 1) for i in range(n)])})


def pairing_on_tensor(pa: PairingIso, pb: PairingIso) -> PairingIso:
    if pa.category.field != pb.category.field:
        raise StructureError("pairings over different fields")
    ab = tensor_categories(pa.category, pb.category)
    phi = {}
    for p, q in product(ab.objects, repeat=2):
        (x1, x2), (y1, y2) = ab.factors[p], ab.factors[q]
        phi[p, q] = kron(pa.phi[x1, y1], pb.phi[x2, y2])
    return PairingIso(ab, phi)


def pairing_on_category(pa: PairingIso, target: VCategory) -> PairingIso:
    """Reattach ``phi`` to a category carrying identical data (e.g. a cached tensor)."""
    return PairingIso(target, pa.phi)
