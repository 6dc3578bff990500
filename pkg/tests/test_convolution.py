import random
from dataclasses import replace
from itertools import product

import pytest

from coendkit.convolution import (
    CLOSURE_STEPS, STAR_STEPS, StepFailure, StarIso, bialgebra_promonoidal, closure_witness, day_dual, day_hom,
    day_tensor, graded_delta_promonoidal, graded_skeleton, same_promonoidal_data, star_from_antipode,
    trace_promonoidal, unit_iso, validate_antipode, validate_promonoidal, validate_star,
)
from coendkit.coend import coend_map
from coendkit.functors import is_natural_iso, validate_functor
from coendkit.gallery import (
    graded_closure_dims, graded_hom_dims, graded_module, group_module, group_rep_matrices_regular, random_group_module,
)
from coendkit.groups import cyclic
from coendkit.linalg import FieldSpec, Mat, QQ, is_iso, kron, tensor_permutation
from coendkit.vcat import StructureError, delta_pairing

F5 = FieldSpec(5)
Z2, Z3 = cyclic(2), cyclic(3)


def dims_of(F):
    return {t[0]: F.dim(t) for t in F.tuples()}


def graded_tensor_dims(group, fd, gd):
    """``(F (x) G)(a) = sum over xy = a of F(x) G(y)``."""
    return {a: sum(fd[x] * gd[y] for x, y in product(group.elements, repeat=2) if group.mul(x, y) == a)
            for a in group.elements}


def graded(group, f=QQ):
    return trace_promonoidal(graded_skeleton(group, f), group.elements)


# --- promonoidal data -----------------------------------------------------------


@pytest.mark.parametrize("group", [Z2, Z3], ids=["Z2", "Z3"])
def test_trace_on_graded_skeleton_is_delta(group):
    pm, ad = graded(group)
    assert same_promonoidal_data(pm, graded_delta_promonoidal(group, QQ))
    assert validate_promonoidal(pm).ok and validate_antipode(pm, ad).ok
    assert len(pm.category.objects) == group.order


def test_trace_needs_objects_closed_under_duals():
    with pytest.raises(StructureError, match="dual of g"):
        trace_promonoidal(graded_skeleton(Z3, QQ), ["g"])


def test_partial_trace_on_z4_validates():
    pm, ad = trace_promonoidal(graded_skeleton(cyclic(4), QQ), ["e", "g", "g3"])
    assert pm.p.dim(("g", "g", "g3")) == 0  # g * g = g2 is not among the objects
    assert validate_promonoidal(pm).ok and validate_antipode(pm, ad).ok


def test_unit_iso_is_natural_iso():
    pm, _ = bialgebra_promonoidal(Z3, QQ)
    assert is_natural_iso(unit_iso(pm)).ok


def test_broken_unit_map_is_reported():
    pm = graded_delta_promonoidal(Z2, QQ)
    bad = replace(pm, unit_map={k: m.scale(0) for k, m in pm.unit_map.items()}, _cache={})
    assert not validate_promonoidal(bad).ok


# --- Day operations -------------------------------------------------------------


def test_day_tensor_on_unit_is_pointwise():
    pm = graded_delta_promonoidal(cyclic(1), QQ)
    a = pm.category
    out, _ = day_tensor(graded_module(a, {"e": 2}), graded_module(a, {"e": 3}), pm)
    assert dims_of(out) == {"e": 6}


@pytest.mark.parametrize("group,fd,gd", [
    (Z2, {"e": 2, "g": 3}, {"e": 1, "g": 4}),
    (Z3, {"e": 1, "g": 2, "g2": 3}, {"e": 2, "g": 1, "g2": 1}),
])
def test_day_tensor_and_hom_on_graded(group, fd, gd):
    pm, _ = graded(group)
    a = pm.category
    F, G = graded_module(a, fd), graded_module(a, gd)
    conv, _ = day_tensor(F, G, pm)
    assert dims_of(conv) == graded_tensor_dims(group, fd, gd)
    hom, _ = day_hom(F, G, pm)
    assert dims_of(hom) == graded_hom_dims(group, fd, gd)
    assert validate_functor(conv).ok and validate_functor(hom).ok


def test_z2_graded_day_values():
    pm, _ = graded(Z2)
    a = pm.category
    F, G = graded_module(a, {"e": 2, "g": 3}), graded_module(a, {"e": 1, "g": 4})
    assert dims_of(day_tensor(F, G, pm)[0]) == {"e": 14, "g": 11}
    assert dims_of(day_hom(F, G, pm)[0]) == {"e": 14, "g": 11}


def test_day_hom_on_unit_is_pointwise_hom():
    pm = graded_delta_promonoidal(cyclic(1), QQ)
    a = pm.category
    assert dims_of(day_hom(graded_module(a, {"e": 2}), graded_module(a, {"e": 3}), pm)[0]) == {"e": 6}


def test_convolving_with_j_on_the_right_gives_back_f():
    # the supplied unit law contracts j in the second slot of p, so F (x) j
    # is the orientation it certifies; built here as an explicit iso
    pm, _ = bialgebra_promonoidal(Z3, QQ)
    a = pm.category
    F = random_group_module(a, Z3, 3, random.Random(1))
    conv, pres = day_tensor(F, pm.j, pm)
    for (w,), pr in pres.items():
        cols = []
        for key, full in zip(pr.keys, pr.full):
            x, c, _, _, target = full
            dfx = F.dim((x,))
            u = pm.unit_map.get((x, c, target))
            swap = tensor_permutation(QQ, [dfx, u.cols], [1, 0])
            cols.append(F.uncurried(0, (x,), target) @ kron(u, Mat.identity(QQ, dfx)) @ swap)
        m = coend_map(pr, Mat.identity(QQ, F.dim((w,))), Mat.hstack(QQ, cols, rows=F.dim((w,))))
        assert is_iso(m)


@pytest.mark.parametrize("build", [lambda: graded(Z2)[0], lambda: graded(Z3)[0], lambda: bialgebra_promonoidal(Z2, QQ)[0]],
                         ids=["Z2", "Z3", "bialgebra-Z2"])
def test_j_is_unit_for_internal_hom_and_self_dual(build):
    pm = build()
    a = pm.category
    H = graded_module(a, {x: i + 1 for i, x in enumerate(a.objects)}) if a.groupoid and len(a.objects) > 1 \
        else random_group_module(a, Z2, 2, random.Random(0))
    assert dims_of(day_hom(pm.j, H, pm)[0]) == dims_of(H)
    assert dims_of(day_dual(pm.j, pm)[0]) == dims_of(pm.j)


def test_day_dual_examples():
    pm = graded_delta_promonoidal(cyclic(1), QQ)
    assert dims_of(day_dual(graded_module(pm.category, {"e": 3}), pm)[0]) == {"e": 3}
    pm2, _ = graded(Z2)
    assert dims_of(day_dual(graded_module(pm2.category, {"e": 2, "g": 3}), pm2)[0]) == {"e": 2, "g": 3}
    pm3, _ = graded(Z3)
    got = dims_of(day_dual(graded_module(pm3.category, {"e": 1, "g": 2, "g2": 3}), pm3)[0])
    assert got == {"e": 1, "g": 3, "g2": 2}


def test_bialgebra_regular_tensor_regular():
    pm, _ = bialgebra_promonoidal(Z2, QQ)
    reg = group_module(pm.category, Z2, group_rep_matrices_regular(Z2, QQ))
    assert dims_of(day_tensor(reg, reg, pm)[0]) == {"*": 4}


# --- star isomorphism -----------------------------------------------------------


def test_star_on_unit_is_identity():
    pm, ad = bialgebra_promonoidal(cyclic(1), QQ)
    star = star_from_antipode(pm, ad)
    assert list(star.components.values()) == [Mat.identity(QQ, 1)]


def _is_permutation(m):
    return m.rows == m.cols and all(sum(1 for _ in m.submatrix([r], range(m.cols)).nonzero_entries()) == 1
                                    for r in range(m.rows)) and all(v == 1 for _, _, v in m.nonzero_entries())


def test_star_on_z2_graded_is_permutations():
    pm, ad = graded(Z2)
    star = star_from_antipode(pm, ad)
    assert all(_is_permutation(m) for m in star.components.values() if m.rows)


@pytest.mark.parametrize("group", [Z2, Z3], ids=["Z2", "Z3"])
def test_star_from_bialgebra_is_certified(group):
    pm, ad = bialgebra_promonoidal(group, QQ)
    star = star_from_antipode(pm, ad)
    assert validate_star(pm, star).ok
    assert all(len(fs) == len(STAR_STEPS) and all(is_iso(m) for m in fs) for fs in star.factors.values())


def test_star_rejects_missing_sigma():
    pm, ad = bialgebra_promonoidal(Z3, QQ)
    with pytest.raises(StepFailure) as e:
        star_from_antipode(pm, replace(ad, sigma=None))
    assert e.value.step == "2 by hyp and S^2 ~= 1 (c, sigma)"


def test_star_rejects_corrupted_c():
    pm, ad = bialgebra_promonoidal(Z2, QQ)
    bad = {k: m + Mat.from_entries(QQ, m.rows, m.cols, [(0, 1, 1)]) for k, m in ad.c.items()}
    assert not validate_antipode(pm, replace(ad, c=bad)).ok
    with pytest.raises(StepFailure) as e:
        star_from_antipode(pm, replace(ad, c=bad))
    assert e.value.step == STAR_STEPS[1]


def test_star_rejects_corrupted_d():
    pm, ad = graded(Z3)
    bad = dict(ad.d)
    k = next(k for k, m in bad.items() if m.rows)
    bad[k] = bad[k].scale(0)
    with pytest.raises(StepFailure) as e:
        star_from_antipode(pm, replace(ad, d=bad))
    assert e.value.step == STAR_STEPS[0]


def test_validate_star_rejects_scaled_component():
    pm, ad = bialgebra_promonoidal(Z2, QQ)
    star = star_from_antipode(pm, ad)
    comps = dict(star.components)
    k = next(iter(comps))
    m = comps[k]
    comps[k] = m + Mat.from_entries(QQ, m.rows, m.cols, [(0, 0, 1)])
    assert not validate_star(pm, StarIso(comps)).ok


# --- closure certificate --------------------------------------------------------


def test_closure_on_unit():
    pm, ad = bialgebra_promonoidal(cyclic(1), QQ)
    a = pm.category
    k2 = group_module(a, cyclic(1), {"e": Mat.identity(QQ, 2)})
    w = closure_witness(k2, k2, pm, star_from_antipode(pm, ad), delta_pairing(a))
    assert w.iso and w.natural and w.family["*"].shape == (4, 4)


@pytest.mark.parametrize("group,gd,hd", [
    (Z2, {"e": 2, "g": 3}, {"e": 1, "g": 4}),
    (Z3, {"e": 1, "g": 2, "g2": 3}, {"e": 2, "g": 1, "g2": 1}),
])
def test_closure_on_graded(group, gd, hd):
    pm, ad = graded(group)
    a = pm.category
    g, h = graded_module(a, gd), graded_module(a, hd)
    w = closure_witness(g, h, pm, star_from_antipode(pm, ad), delta_pairing(a))
    assert w.iso and w.natural
    assert w.lhs_dims == graded_closure_dims(group, gd, hd)
    assert w.rhs_dims == dims_of(day_hom(g, h, pm)[0])
    assert w.report()["verdict"] == "compact-closure-certified"


def test_closure_z2_component_dims():
    pm, ad = graded(Z2)
    a = pm.category
    w = closure_witness(graded_module(a, {"e": 2, "g": 3}), graded_module(a, {"e": 1, "g": 4}), pm,
                        star_from_antipode(pm, ad), delta_pairing(a))
    assert w.lhs_dims == w.rhs_dims == {"e": 14, "g": 11}


def test_closure_bialgebra_z3_over_f5():
    pm, ad = bialgebra_promonoidal(Z3, F5)
    a = pm.category
    rng = random.Random(5)
    g, h = random_group_module(a, Z3, 2, rng), random_group_module(a, Z3, 3, rng)
    w = closure_witness(g, h, pm, star_from_antipode(pm, ad), delta_pairing(a))
    assert w.iso and w.natural


def test_closure_rejects_broken_star():
    pm, ad = bialgebra_promonoidal(Z2, QQ)
    a = pm.category
    star = star_from_antipode(pm, ad)
    k = next(iter(star.components))
    broken = StarIso({k: star.components[k].scale(0)})
    reg = group_module(a, Z2, group_rep_matrices_regular(Z2, QQ))
    with pytest.raises(StepFailure) as e:
        closure_witness(reg, reg, pm, broken, delta_pairing(a))
    assert e.value.step == CLOSURE_STEPS[2]


@pytest.mark.parametrize("build", [lambda: graded(Z3)[0], lambda: bialgebra_promonoidal(Z3, QQ)[0]], ids=["graded", "bialgebra"])
def test_j_on_the_left_keeps_dims(build):
    pm = build()
    a = pm.category
    F = graded_module(a, {"e": 1, "g": 2, "g2": 3}) if len(a.objects) == 3 else random_group_module(a, Z3, 3, random.Random(2))
    assert dims_of(day_tensor(pm.j, F, pm)[0]) == dims_of(F)
