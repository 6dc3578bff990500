import random

from hypothesis import given, settings, strategies as st

from coendkit.fuzz import Bounds, InstanceSpec, build, check_instance, corrupt, corruption_detected, fuzz, random_spec, shrink
from coendkit.functors import validate_functor
from coendkit.serialize import dumps
from coendkit.vcat import validate_category, validate_pairing


def test_report_is_deterministic():
    b = Bounds(fields=("Q", "F5"))
    assert dumps(fuzz(7, 15, b)) == dumps(fuzz(7, 15, b))


def test_report_changes_with_seed():
    assert fuzz(1, 10)["violations"] == [] and fuzz(1, 10) != fuzz(2, 10)


def test_odd_fields_have_no_violations():
    rep = fuzz(3, 40, Bounds(fields=("Q", "F5")))
    assert rep["violations"] == []
    assert rep["totals"]["corruption_detected"] == rep["totals"]["corruption_tried"] > 0


def test_f2_failures_shrink_to_one_object_z2():
    rep = fuzz(11, 40, Bounds(fields=("F2",)))
    kinds = {v["kind"] for v in rep["violations"]}
    assert kinds <= {"interchange", "alpha"} and kinds
    for v in rep["violations"]:
        assert v["shrunk"]["components"] == [[1, "Z2"]]


def test_shrink_leaves_passing_spec_alone_when_nothing_fails():
    spec = InstanceSpec("Q", ((2, "Z2"),), (1,), (1,), False, 0)
    assert shrink(spec, "alpha") == spec


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_random_instances_are_valid(seed):
    spec = random_spec(random.Random(seed), Bounds(fields=("Q", "F2", "F5")))
    a, t, phi = build(spec)
    assert validate_category(a).ok and validate_functor(t).ok and validate_pairing(phi).ok


@settings(max_examples=15)
@given(st.integers(0, 10**6))
def test_corruption_is_always_caught(seed):
    spec = random_spec(random.Random(seed), Bounds(fields=("Q", "F5")))
    a, t, phi = build(spec)
    assert corruption_detected(t, corrupt(phi, random.Random(seed)))


def test_isolated_scalar_object_is_zeroed_not_rescaled():
    spec = InstanceSpec("Q", ((1, "Z1"),), (1,), (1,), False, 0)
    _, _, phi = build(spec)
    bad = corrupt(phi, random.Random(0))
    assert not validate_pairing(bad).ok
    assert check_instance(spec)["failures"] == []
