import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coendkit import linalg
from coendkit.linalg import (
    FieldMismatch, FieldSpec, Mat, QQ, cokernel, dual_map, hom_iso, is_iso, kernel, kron, mat_from_json,
    mat_to_json, product_is_zero, solve, tensor_permutation,
)

from _oracle import matmul, rank
from conftest import FIELDS, matrices

F2, F5 = FieldSpec(2), FieldSpec(5)


def test_field_parse_accepts_spellings():
    assert FieldSpec.parse("QQ") == QQ
    assert FieldSpec.parse("GF(5)") == F5 == FieldSpec.parse("Fp5") == FieldSpec.parse("f5")
    with pytest.raises(ValueError):
        FieldSpec(6)


def test_scalars_round_trip_and_reduce():
    assert QQ.serialize("6/4") == "3/2"
    assert F5.serialize(-1) == 4
    assert F5("1/2") == F5(3)
    with pytest.raises(FieldMismatch):
        QQ(F5(1))


def test_mixed_fields_refused():
    with pytest.raises(FieldMismatch):
        Mat.identity(QQ, 2) @ Mat.identity(F5, 2)


def test_kernel_examples():
    k = kernel(Mat.from_rows(QQ, [[1, 2], [2, 4]]))
    assert k.dim == 1
    assert k.basis == Mat.column(QQ, [-2, 1])
    assert kernel(Mat.zeros(QQ, 3, 3)).dim == 3
    assert kernel(Mat.identity(QQ, 4)).dim == 0


def test_cokernel_examples():
    assert cokernel(Mat.identity(QQ, 3)).dim == 0
    q = cokernel(Mat.zeros(QQ, 3, 2))
    assert q.dim == 3 and q.proj == Mat.identity(QQ, 3)
    q = cokernel(Mat.from_rows(QQ, [[1], [1]]))
    assert q.dim == 1
    assert (q.proj @ Mat.column(QQ, [1, 1])).is_zero()


@pytest.mark.parametrize("f", FIELDS, ids=str)
@given(data=st.data())
def test_kernel_matches_reference_rank(f, data):
    m, rows = data.draw(matrices(f))
    k = kernel(m)
    assert k.dim == m.cols - rank(rows, f.p)
    assert (m @ k.basis).is_zero()
    assert k.basis.rank() == k.dim


@pytest.mark.parametrize("f", FIELDS, ids=str)
@given(data=st.data())
def test_cokernel_is_a_split_quotient(f, data):
    m, rows = data.draw(matrices(f))
    q = cokernel(m)
    assert q.dim == m.rows - rank(rows, f.p)
    assert (q.proj @ m).is_zero()
    assert q.proj @ q.section == Mat.identity(f, q.dim)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_product_matches_reference(r, k, c, rnd):
    ra = [[rnd.randint(-3, 3) for _ in range(k)] for _ in range(r)]
    rb = [[rnd.randint(-3, 3) for _ in range(c)] for _ in range(k)]
    for f in FIELDS:
        got = (Mat.from_rows(f, ra) @ Mat.from_rows(f, rb)).tolist()
        assert [[int(x) if f.p else Fraction(str(x)) for x in row] for row in got] == matmul(ra, rb, f.p)


@given(data=st.data())
def test_transpose_reverses_products(data):
    a, _ = data.draw(matrices(QQ, 3, 3))
    b, _ = data.draw(matrices(QQ, 3, 3).filter(lambda mb: mb[0].rows == a.cols))
    assert (a @ b).T == b.T @ a.T


def test_transpose_examples():
    assert Mat.identity(QQ, 3).T == Mat.identity(QQ, 3)
    m = Mat.from_rows(QQ, [[1, 2, 3], [4, 5, 6]])
    assert m.T == Mat.from_rows(QQ, [[1, 4], [2, 5], [3, 6]])


def test_kron_examples():
    assert kron(Mat.identity(QQ, 2), Mat.identity(QQ, 3)) == Mat.identity(QQ, 6)
    m = Mat.from_rows(QQ, [[1, -1], [0, 3]])
    assert kron(Mat.from_rows(QQ, [[2]]), m) == m.scale(2)
    swap = Mat.from_rows(QQ, [[0, 1], [1, 0]])
    e0 = Mat.column(QQ, [1, 0])
    # left factor slowest: block (r, c) of the result is swap[r, c] * e0
    expected = [[0, 0], [0, 0], [0, 0], [0, 0]]
    for r in range(2):
        for c in range(2):
            expected[2 * r][c] = swap[r, c]
    assert kron(swap, e0).tolist() == expected


def test_hom_iso_examples():
    assert hom_iso(QQ, 1, 1) == Mat.identity(QQ, 1)
    assert hom_iso(QQ, 2, 1) == Mat.identity(QQ, 2)


def test_hom_iso_agrees_with_application():
    # v_i* (x) w_j goes to a row-major w x v matrix; applying it to v_b must
    # give v_i*(v_b) w_j
    v, w = 2, 3
    h = hom_iso(QQ, v, w)
    for i in range(v):
        for j in range(w):
            flat = h @ Mat.unit_vector(QQ, v * w, i * w + j)
            m = Mat.from_rows(QQ, [[flat[r * v + c, 0] for c in range(v)] for r in range(w)])
            for b in range(v):
                expected = Mat.unit_vector(QQ, w, j).scale(1 if b == i else 0)
                assert m @ Mat.unit_vector(QQ, v, b) == expected


def test_is_iso_examples():
    assert is_iso(Mat.identity(QQ, 3))
    assert not is_iso(Mat.from_rows(QQ, [[1, 2], [2, 4]]))
    assert not is_iso(Mat.zeros(QQ, 2, 3))


def test_solve_finds_preimage_or_none():
    a = Mat.from_rows(QQ, [[1, 2], [2, 4]])
    x = solve(a, Mat.column(QQ, [3, 6]))
    assert a @ x == Mat.column(QQ, [3, 6])
    assert solve(a, Mat.column(QQ, [1, 0])) is None


def test_tensor_permutation_swaps_factors():
    p = tensor_permutation(QQ, [2, 3], [1, 0])
    a = Mat.column(QQ, [1, 2])
    b = Mat.column(QQ, [3, 5, 7])
    assert p @ kron(a, b) == kron(b, a)


def test_dual_map_is_transpose():
    m = Mat.from_rows(F5, [[1, 2, 3]])
    assert dual_map(m) == m.T


@pytest.mark.parametrize("f", FIELDS, ids=str)
def test_freivalds_agrees_with_exact_product(f, monkeypatch):
    rng = random.Random(3)
    monkeypatch.setattr(linalg, "EXACT_PRODUCT_LIMIT", 0)
    for _ in range(30):
        a = Mat.from_rows(f, [[rng.randint(-2, 2) for _ in range(4)] for _ in range(3)])
        k = kernel(a)
        assert product_is_zero(a, k.basis)
        if k.dim:
            bumped = k.basis + Mat.from_entries(f, k.basis.rows, k.basis.cols, [(0, 0, 1)])
            assert product_is_zero(a, bumped) == (a @ bumped).is_zero()


def test_json_round_trip():
    m = Mat.from_rows(QQ, [[0, "1/3"], [-2, 0]])
    doc = mat_to_json(m)
    assert doc["entries"] == [[0, 1, "1/3"], [1, 0, "-2/1"]]
    assert mat_from_json(QQ, doc) == m
