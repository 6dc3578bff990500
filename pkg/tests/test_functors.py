from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coendkit.convolution import graded_delta_promonoidal
from coendkit.functors import (
    CO, CONTRA, Functor, NatFamily, build_closure_integrand, constant, fix_slot, hom_bifunctor, natural_violations,
    permute_slots, pointwise_dual, representable, tensor, validate_functor,
)
from coendkit.fuzz import InstanceSpec, build
from coendkit.gallery import graded_module, group_module, group_rep_matrices_regular
from coendkit.groups import cyclic, symmetric3
from coendkit.linalg import Mat, QQ
from coendkit.vcat import (
    StructureError, connected_groupoid, group_algebra, linearize_groupoid, pair_name, tensor_categories,
    unit_category,
)


def specs():
    comps = st.lists(st.tuples(st.integers(1, 2), st.sampled_from(["Z1", "Z2", "Z3"])), min_size=1, max_size=2)
    return comps.flatmap(lambda cs: st.builds(
        InstanceSpec,
        field=st.sampled_from(["Q", "F5", "F2"]),
        components=st.just(tuple(cs)),
        m_dims=st.tuples(*[st.integers(0, 2)] * len(cs)),
        n_dims=st.tuples(*[st.integers(0, 2)] * len(cs)),
        with_hom=st.booleans(),
        seed=st.integers(0, 2**20),
    ))


def test_constant_on_unit_validates():
    assert validate_functor(constant(unit_category(QQ), 3)).ok


def test_hom_bifunctor_of_s3_validates_and_catches_corruption():
    a = group_algebra(symmetric3(), QQ)
    t = hom_bifunctor(a)
    assert validate_functor(t).ok
    key = (1, ("*", "*"), "*")
    blocks = list(t.act[key])
    blocks[2] = blocks[2] + Mat.from_entries(QQ, 6, 6, [(0, 0, 1)])
    act = dict(t.act)
    act[key] = tuple(blocks)
    assert not validate_functor(Functor(a, t.variance, t.dims, act)).ok


def test_hom_bifunctor_of_unit_is_constant():
    t = hom_bifunctor(unit_category(QQ))
    assert t.dims == {("*", "*"): 1}
    assert all(m == Mat.identity(QQ, 1) for bl in t.act.values() for m in bl)


def test_hom_bifunctor_of_z2_is_left_and_right_multiplication():
    z2 = cyclic(2)
    a = group_algebra(z2, QQ)
    t = hom_bifunctor(a)
    assert t.dim(("*", "*")) == 2
    for (k, g), (i, h) in product(enumerate(z2.elements), repeat=2):
        prod = Mat.unit_vector(QQ, 2, z2.index(z2.mul(h, g)))
        # slot 1 postcomposes with g; slot 0 precomposes with g
        assert t.act[1, ("*", "*"), "*"][k] @ Mat.unit_vector(QQ, 2, i) == Mat.unit_vector(QQ, 2, z2.index(z2.mul(g, h)))
        assert t.act[0, ("*", "*"), "*"][k] @ Mat.unit_vector(QQ, 2, i) == prod


def test_hom_bifunctor_of_two_object_groupoid():
    a = linearize_groupoid(connected_groupoid(["x", "y"], cyclic(2)), QQ)
    t = hom_bifunctor(a)
    assert {k: v for k, v in t.dims.items() if v} == {p: 2 for p in product("xy", repeat=2)}
    assert validate_functor(t).ok


def test_pointwise_dual_of_constant_and_regular():
    assert pointwise_dual(constant(unit_category(QQ), 2)).act == constant(unit_category(QQ), 2).act
    z2 = cyclic(2)
    a = group_algebra(z2, QQ)
    reg = group_module(a, z2, group_rep_matrices_regular(z2, QQ))
    d = pointwise_dual(reg)
    assert d.variance == (CONTRA,)
    assert validate_functor(d).ok
    assert all(x == y.T for x, y in zip(d.act[0, ("*",), "*"], reg.act[0, ("*",), "*"]))


@given(specs())
def test_double_dual_is_identity_on_data(spec):
    _, t, _ = build(spec)
    dd = pointwise_dual(pointwise_dual(t))
    assert dd.variance == t.variance and dd.dims == t.dims
    assert all(dd.blocks(*k) == t.blocks(*k) for k in set(t.act) | set(dd.act))


@given(specs())
def test_random_bifunctors_validate_and_actions_commute(spec):
    a, t, _ = build(spec)
    assert validate_functor(t).ok
    assert validate_functor(pointwise_dual(t)).ok
    # T(f,1) T(1,g) = T(1,g) T(f,1) on basis morphisms, directly
    for x, y, x2, y2 in product(a.objects, repeat=4):
        for f_i, g_j in product(range(a.hom(x2, x)), range(a.hom(y, y2))):
            left = t.blocks(0, (x, y2), x2)[f_i] @ t.blocks(1, (x, y), y2)[g_j]
            right = t.blocks(1, (x2, y), y2)[g_j] @ t.blocks(0, (x, y), x2)[f_i]
            assert left == right


def test_identity_family_is_natural():
    a = group_algebra(cyclic(3), QQ)
    t = hom_bifunctor(a)
    ident = NatFamily(t, t, {k: Mat.identity(QQ, d) for k, d in t.dims.items()})
    assert natural_violations(ident).ok


def test_scaled_family_on_representable_is_natural_but_twisted_one_is_not():
    a = linearize_groupoid(connected_groupoid(["x", "y"], cyclic(2)), QQ)
    r = representable(a, "x")
    nat = NatFamily(r, r, {k: Mat.identity(QQ, d).scale(3) for k, d in r.dims.items()})
    assert natural_violations(nat).ok
    twist = dict(nat.comp)
    twist["x",] = Mat.identity(QQ, 2)
    assert not natural_violations(NatFamily(r, r, twist)).ok


def test_fix_and_permute_slots():
    a = linearize_groupoid(connected_groupoid(["x", "y"], cyclic(2)), QQ)
    t = tensor(hom_bifunctor(a), representable(a, "x"))
    p = permute_slots(t, [2, 0, 1])
    assert p.variance == (CO, CONTRA, CO)
    assert validate_functor(p).ok
    fx = fix_slot(t, 0, "y")
    assert fx.variance == (CO, CO) and fx.dim(("x", "x")) == t.dim(("y", "x", "x"))
    assert validate_functor(fx).ok


def test_tensor_refuses_other_category():
    with pytest.raises(StructureError):
        tensor(hom_bifunctor(group_algebra(cyclic(2), QQ)), hom_bifunctor(group_algebra(cyclic(3), QQ)))


def test_closure_integrand_on_unit_is_constant():
    pm = graded_delta_promonoidal(cyclic(1), QQ)
    a = pm.category
    k = graded_module(a, {"e": 1})
    u = build_closure_integrand(k, k, pm.p, "e", tensor_categories(a, a))
    assert {k: v for k, v in u.dims.items() if v} == {(pair_name("e", "e"), pair_name("e", "e")): 1}


def test_closure_integrand_graded_diagonal_dims():
    pm = graded_delta_promonoidal(cyclic(2), QQ)
    a = pm.category
    g = graded_module(a, {"e": 2, "g": 3})
    h = graded_module(a, {"e": 1, "g": 4})
    u = build_closure_integrand(g, h, pm.p, "e", tensor_categories(a, a))
    assert validate_functor(u).ok
    diag = {(b, c): u.dim((pair_name(b, c), pair_name(b, c))) for b, c in product("eg", repeat=2)}
    # p(e, B, C) is k exactly when C = B
    assert diag == {("e", "e"): 2 * 1, ("g", "g"): 3 * 4, ("e", "g"): 0, ("g", "e"): 0}
    assert sum(diag.values()) == 14
