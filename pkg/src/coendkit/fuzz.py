"""Random instances for the interchange map and alpha, with shrinking.

Instances are linearized finite groupoids, which are valid categories with a
canonical delta pairing by construction.  Each instance is described by a small
:class:`InstanceSpec`, so a failure can be shrunk by shrinking the spec.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, replace

from .coend import InvalidInput, alpha_components, alpha_is_dinatural, interchange, lemma_alpha
from .functors import Functor, direct_sum, from_representation, hom_bifunctor, pointwise_dual, tensor
from .gallery import group_rep_matrices, unimodular
from .groups import by_name
from .linalg import FieldSpec, Mat
from .vcat import PairingIso, VCategory, connected_groupoid, delta_pairing, disjoint_union, linearize_groupoid, validate_pairing

GROUPS_BY_ORDER = {1: "Z1", 2: "Z2", 3: "Z3"}


@dataclass(frozen=True)
class Bounds:
    max_objects: int = 3
    max_hom: int = 3
    max_dim: int = 2
    fields: tuple = ("Q",)


@dataclass(frozen=True)
class InstanceSpec:
    field: str
    components: tuple  # ((object count, group name), ...)
    m_dims: tuple  # dimension of M on each component
    n_dims: tuple
    with_hom: bool
    seed: int

    def to_json(self) -> dict:
        d = asdict(self)
        d["components"] = [list(c) for c in self.components]
        d["m_dims"] = list(self.m_dims)
        d["n_dims"] = list(self.n_dims)
        return d


def random_spec(rng: random.Random, bounds: Bounds) -> InstanceSpec:
    field = rng.choice(bounds.fields)
    n_obj = rng.randint(1, bounds.max_objects)
    comps = []
    left = n_obj
    while left:
        k = rng.randint(1, left)
        order = rng.randint(1, min(3, bounds.max_hom))
        comps.append((k, GROUPS_BY_ORDER[order]))
        left -= k
    m_dims = tuple(rng.randint(0, bounds.max_dim) for _ in comps)
    n_dims = tuple(rng.randint(0, bounds.max_dim) for _ in comps)
    return InstanceSpec(field, tuple(comps), m_dims, n_dims, rng.random() < 0.5, rng.randrange(2**31))


def _groupoid_functor(a: VCategory, spec: InstanceSpec, dims: tuple, rng: random.Random, names) -> Functor:
    """A representation of each vertex group, transported along random isos."""
    f = a.field
    rep = {}
    obj_dims = {}
    for (objs, grp), d in zip(names, dims):
        for x in objs:
            obj_dims[x] = d
        if d == 0:
            for x in objs:
                for y in objs:
                    for g in grp.elements:
                        rep[f"{y}<{g}<{x}"] = Mat.zeros(f, 0, 0)
            continue
        rho = group_rep_matrices(grp, f, d, rng)
        transport = {x: unimodular(f, d, rng) for x in objs}
        inv = {x: m.inverse() for x, m in transport.items()}
        for x in objs:
            for y in objs:
                for g in grp.elements:
                    rep[f"{y}<{g}<{x}"] = transport[y] @ rho[g] @ inv[x]
    return from_representation(a, rep, obj_dims)


def build(spec: InstanceSpec) -> tuple[VCategory, Functor, PairingIso]:
    f = FieldSpec.parse(spec.field)
    rng = random.Random(spec.seed)
    names = []
    k = 0
    for count, gname in spec.components:
        objs = tuple(f"o{k + i}" for i in range(count))
        k += count
        names.append((objs, by_name(gname)))
    g = disjoint_union([connected_groupoid(objs, grp) for objs, grp in names])
    a = linearize_groupoid(g, f)
    m = _groupoid_functor(a, spec, spec.m_dims, rng, names)
    n = _groupoid_functor(a, spec, spec.n_dims, rng, names)
    t = tensor(pointwise_dual(m), n)
    if spec.with_hom:
        t = direct_sum(t, hom_bifunctor(a))
    return a, t, delta_pairing(a)


def _rescaling_only(a: VCategory, x: str, y: str) -> bool:
    # an isolated object with a one-dimensional endomorphism space: any nonzero
    # multiple of its pairing entry is again a valid pairing
    return x == y and a.hom(x, x) == 1 and all(a.hom(x, z) == 0 and a.hom(z, x) == 0 for z in a.objects if z != x)


def corrupt(phi: PairingIso, rng: random.Random) -> PairingIso:
    """Change one entry of one component.

    The entry is increased by 1, except on isolated one-dimensional objects,
    where that is a rescaling to another valid pairing; there it is zeroed.
    """
    a = phi.category
    spots = [(x, y) for (x, y), m in sorted(phi.phi.items()) if m.rows * m.cols]
    x, y = rng.choice(spots)
    m = phi.phi[x, y]
    i, j = rng.randrange(m.rows), rng.randrange(m.cols)
    new = 0 if _rescaling_only(a, x, y) else m[i, j] + 1
    entries = [(r, c, v) for r, c, v in m.nonzero_entries() if (r, c) != (i, j)] + [(i, j, new)]
    bad = dict(phi.phi)
    bad[x, y] = Mat.from_entries(a.field, m.rows, m.cols, entries)
    return PairingIso(a, bad)


def corruption_detected(t: Functor, bad: PairingIso) -> bool:
    if not validate_pairing(bad).ok:
        return True
    try:
        return not alpha_is_dinatural(t, alpha_components(t, bad))
    except ValueError:
        return True


def check_instance(spec: InstanceSpec) -> dict:
    """Verdicts on one instance; ``failures`` lists what went wrong."""
    a, t, phi = build(spec)
    out = {"interchange_iso": None, "pairing_valid": None, "alpha_iso": None, "corruption_detected": None}
    failures = []
    out["interchange_iso"] = interchange(a, t).iso
    if not out["interchange_iso"]:
        failures.append("interchange")
    out["pairing_valid"] = validate_pairing(phi).ok
    if out["pairing_valid"]:
        try:
            out["alpha_iso"] = lemma_alpha(a, t, phi).iso
        except InvalidInput:
            out["alpha_iso"] = False
        if not out["alpha_iso"]:
            failures.append("alpha")
    if any(m.rows * m.cols for m in phi.phi.values()):
        out["corruption_detected"] = corruption_detected(t, corrupt(phi, random.Random(spec.seed + 1)))
        if not out["corruption_detected"]:
            failures.append("corruption")
    out["failures"] = failures
    return out


def _smaller(spec: InstanceSpec):
    comps, md, nd = list(spec.components), list(spec.m_dims), list(spec.n_dims)
    if len(comps) > 1:
        for k in range(len(comps)):
            yield replace(
                spec, components=tuple(comps[:k] + comps[k + 1:]),
                m_dims=tuple(md[:k] + md[k + 1:]), n_dims=tuple(nd[:k] + nd[k + 1:]),
            )
    for k, (count, gname) in enumerate(comps):
        if count > 1:
            yield replace(spec, components=tuple(comps[:k] + [(count - 1, gname)] + comps[k + 1:]))
        order = by_name(gname).order
        if order > 1:
            yield replace(spec, components=tuple(comps[:k] + [(count, GROUPS_BY_ORDER[order - 1])] + comps[k + 1:]))
    for k in range(len(md)):
        if md[k]:
            yield replace(spec, m_dims=tuple(md[:k] + [md[k] - 1] + md[k + 1:]))
        if nd[k]:
            yield replace(spec, n_dims=tuple(nd[:k] + [nd[k] - 1] + nd[k + 1:]))
    if spec.with_hom:
        yield replace(spec, with_hom=False)


def shrink(spec: InstanceSpec, kind: str, limit: int = 200) -> InstanceSpec:
    """Greedily shrink while the failure ``kind`` persists."""
    tries = 0
    improved = True
    while improved and tries < limit:
        improved = False
        for cand in _smaller(spec):
            tries += 1
            try:
                still = kind in check_instance(cand)["failures"]
            except Exception:
                still = False
            if still:
                spec = cand
                improved = True
                break
    return spec


def fuzz(seed: int, count: int, bounds: Bounds = Bounds(), shrink_failures: bool = True) -> dict:
    """Run ``count`` random instances; the report depends only on the arguments."""
    rng = random.Random(seed)
    totals = {"interchange_iso": 0, "pairing_valid": 0, "alpha_iso": 0, "corruption_detected": 0, "corruption_tried": 0}
    per_field = {}
    violations = []
    for i in range(count):
        spec = random_spec(rng, bounds)
        res = check_instance(spec)
        pf = per_field.setdefault(spec.field, {"instances": 0, "interchange_iso": 0, "alpha_iso": 0, "pairing_valid": 0})
        pf["instances"] += 1
        for key in ("interchange_iso", "pairing_valid", "alpha_iso"):
            if res[key]:
                totals[key] += 1
                pf[key] += 1
        if res["corruption_detected"] is not None:
            totals["corruption_tried"] += 1
            totals["corruption_detected"] += bool(res["corruption_detected"])
        for kind in res["failures"]:
            entry = {"index": i, "kind": kind, "spec": spec.to_json()}
            if shrink_failures:
                entry["shrunk"] = shrink(spec, kind).to_json()
            violations.append(entry)
    return {
        "seed": seed,
        "count": count,
        "bounds": {**asdict(bounds), "fields": list(bounds.fields)},
        "totals": totals,
        "per_field": {k: per_field[k] for k in sorted(per_field)},
        "violations": violations,
    }
