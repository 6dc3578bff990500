"""Exact linear algebra over Q and prime fields.

Every linear map in the package is a :class:`Mat`.  Basis conventions, fixed
once here and used everywhere else:

* ``V (x) W`` has basis ``v_i (x) w_j`` ordered with the left index slowest,
  i.e. position ``i * dim(W) + j``.  :func:`kron` realizes this on maps.
* ``V*`` carries the dual basis of coordinate functionals, so the dual of a
  map is its transpose.  ``(V (x) W)*`` is identified with ``V* (x) W*``
  (the transpose of a Kronecker product is the Kronecker product of
  transposes).
* ``V (+) W`` places ``V`` first.
* ``[V, W]`` is the space of ``dim(W) x dim(V)`` matrices flattened
  row-major: position ``w * dim(V) + v``.  :func:`hom_iso` identifies it
  with ``V* (x) W``.

Matrices are backed by python-flint (``fmpq_mat`` over Q, ``nmod_mat`` over
F_p); all rank decisions are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import random
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import flint


class FieldMismatch(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The base field: ``FieldSpec()`` is Q, ``FieldSpec(p=5)`` is F_5."""

    p: int = 0

    def __post_init__(self):
        if self.p and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls(p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Accepts ``Q``, ``QQ``, ``F5``, ``Fp5``, ``GF(5)``."""
        t = text.strip().upper().replace("GF(", "F").replace(")", "")
        if t in ("Q", "QQ"):
            return cls(0)
        if t.startswith("FP"):
            t = t[2:]
        elif t.startswith("F"):
            t = t[1:]
        return cls(int(t))

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def characteristic(self) -> int:
        return self.p

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"

    def __call__(self, x):
        """Coerce an int, Fraction, string ``"n/d"`` or flint scalar."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.p == 0:
            if isinstance(x, flint.fmpq):
                return x
            if isinstance(x, Fraction):
                return flint.fmpq(x.numerator, x.denominator)
            if isinstance(x, flint.nmod):
                raise FieldMismatch("prime-field scalar used over Q")
            return flint.fmpq(int(x))
        if isinstance(x, flint.nmod):
            if x.modulus() != self.p:
                raise FieldMismatch(f"scalar mod {x.modulus()} used over F{self.p}")
            return x
        if isinstance(x, (Fraction, flint.fmpq)):
            num, den = (x.numerator, x.denominator) if isinstance(x, Fraction) else (int(x.p), int(x.q))
            return flint.nmod(num, self.p) / flint.nmod(den, self.p)
        return flint.nmod(int(x), self.p)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def serialize(self, x) -> str | int:
        """Rationals as canonical ``"n/d"``; prime-field elements as ints in [0, p)."""
        x = self(x)
        if self.p == 0:
            return f"{int(x.p)}/{int(x.q)}"
        return int(x)

    def deserialize(self, s):
        return self(s)

    def to_json(self) -> str:
        return str(self)

    # flint constructors
    def _mat(self, rows: int, cols: int, flat: Sequence = ()):
        if self.p == 0:
            return flint.fmpq_mat(rows, cols, list(flat)) if flat else flint.fmpq_mat(rows, cols)
        return flint.nmod_mat(rows, cols, [self(x) for x in flat], self.p) if flat else flint.nmod_mat(rows, cols, self.p)


QQ = FieldSpec(0)


class Mat:
    """Immutable exact matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "rows", "cols", "_m", "_nz")

    def __init__(self, field: FieldSpec, rows: int, cols: int, flat: Sequence = ()):
        if flat and len(flat) != rows * cols:
            raise ValueError(f"{len(flat)} entries for a {rows}x{cols} matrix")
        self.field = field
        self.rows = rows
        self.cols = cols
        if flat and field.p == 0:
            flat = [field(x) for x in flat]
        self._m = field._mat(rows, cols, flat)
        self._nz = None if flat else []

    @classmethod
    def _wrap(cls, field: FieldSpec, m) -> "Mat":
        out = cls.__new__(cls)
        out.field = field
        out.rows = m.nrows()
        out.cols = m.ncols()
        out._m = m
        out._nz = None
        return out

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], cols: int | None = None) -> "Mat":
        rows = list(rows)
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        flat = [x for r in rows for x in r]
        return cls(field, len(rows), ncols, flat)

    @classmethod
    def from_columns(cls, field: FieldSpec, columns: Sequence[Sequence], rows: int) -> "Mat":
        columns = list(columns)
        flat = [columns[j][i] for i in range(rows) for j in range(len(columns))]
        return cls(field, rows, len(columns), flat)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Mat":
        return cls(field, rows, cols)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Mat":
        return cls.from_entries(field, n, n, [(i, i, 1) for i in range(n)])

    @classmethod
    def from_entries(cls, field: FieldSpec, rows: int, cols: int, entries: Iterable) -> "Mat":
        """Build from ``(i, j, value)`` triplets; repeated positions accumulate."""
        m = field._mat(rows, cols)
        acc = {}
        for i, j, v in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols}")
            v = field(v)
            if (i, j) in acc:
                v = v + acc[i, j]
            acc[i, j] = v
        nz = []
        for (i, j), v in acc.items():
            if v != 0:
                m[i, j] = v
                nz.append((i, j, v))
        out = cls._wrap(field, m)
        out._nz = nz
        return out

    @classmethod
    def column(cls, field: FieldSpec, values: Sequence) -> "Mat":
        return cls(field, len(values), 1, list(values))

    @classmethod
    def unit_vector(cls, field: FieldSpec, n: int, i: int) -> "Mat":
        return cls.from_entries(field, n, 1, [(i, 0, 1)])

    # --- access ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._m[i, j]

    def tolist(self) -> list[list]:
        flat = self._m.entries()
        return [list(flat[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def flat(self) -> list:
        return list(self._m.entries())

    def nonzero_entries(self) -> list[tuple[int, int, object]]:
        """``(i, j, value)`` for every nonzero entry; cached, since matrices never change."""
        if self._nz is None:
            flat = self._m.entries()
            c = self.cols
            self._nz = [(k // c, k % c, x) for k, x in enumerate(flat) if x != 0]
        return self._nz

    def is_zero(self) -> bool:
        if self._nz is not None:
            return not self._nz
        return self._m == self.field._mat(self.rows, self.cols)

    def submatrix(self, rows: Sequence[int] | range, cols: Sequence[int] | range) -> "Mat":
        rpos = {r: k for k, r in enumerate(rows)}
        cpos = {c: k for k, c in enumerate(cols)}
        return Mat.from_entries(
            self.field, len(rpos), len(cpos),
            [(rpos[i], cpos[j], x) for i, j, x in self.nonzero_entries() if i in rpos and j in cpos],
        )

    def col_block(self, start: int, stop: int) -> "Mat":
        return self.submatrix(range(self.rows), range(start, stop))

    def row_block(self, start: int, stop: int) -> "Mat":
        return self.submatrix(range(start, stop), range(self.cols))

    # --- arithmetic -----------------------------------------------------
    def _check(self, other: "Mat"):
        if not isinstance(other, Mat):
            raise TypeError(f"expected Mat, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Mat._wrap(self.field, self._m * other._m)

    def __add__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return Mat._wrap(self.field, self._m + other._m)

    def __sub__(self, other: "Mat") -> "Mat":
        self._check(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return Mat._wrap(self.field, self._m - other._m)

    def __neg__(self) -> "Mat":
        return Mat._wrap(self.field, -self._m)

    def scale(self, c) -> "Mat":
        return Mat._wrap(self.field, self._m * self.field(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self._m == other._m

    def __hash__(self):
        return hash((self.field, self.rows, self.cols, tuple(str(x) for x in self._m.entries())))

    @property
    def T(self) -> "Mat":
        out = Mat._wrap(self.field, self._m.transpose())
        if self._nz is not None:
            out._nz = [(j, i, x) for i, j, x in self._nz]
        return out

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        return self._m.rank()

    def rref(self) -> tuple["Mat", int]:
        if self.rows == 0 or self.cols == 0:
            return self, 0
        r, rank = self._m.rref()
        return Mat._wrap(self.field, r), rank

    def inverse(self) -> "Mat":
        if not is_iso(self):
            raise ValueError("matrix is not invertible")
        if self.rows == 0:
            return self
        return Mat._wrap(self.field, self._m.inv())

    def __repr__(self) -> str:
        return f"Mat[{self.field}]({self.rows}x{self.cols}, {self.tolist()})"

    # --- block assembly -------------------------------------------------
    @staticmethod
    def hstack(field: FieldSpec, blocks: Sequence["Mat"], rows: int | None = None) -> "Mat":
        if not blocks:
            return Mat.zeros(field, rows or 0, 0)
        r = blocks[0].rows
        if any(b.rows != r for b in blocks):
            raise ValueError("hstack: row counts differ")
        entries = []
        c0 = 0
        for b in blocks:
            entries.extend((i, c0 + j, x) for i, j, x in b.nonzero_entries())
            c0 += b.cols
        return Mat.from_entries(field, r, c0, entries)

    @staticmethod
    def vstack(field: FieldSpec, blocks: Sequence["Mat"], cols: int | None = None) -> "Mat":
        if not blocks:
            return Mat.zeros(field, 0, cols or 0)
        c = blocks[0].cols
        if any(b.cols != c for b in blocks):
            raise ValueError("vstack: column counts differ")
        entries = []
        r0 = 0
        for b in blocks:
            entries.extend((r0 + i, j, x) for i, j, x in b.nonzero_entries())
            r0 += b.rows
        return Mat.from_entries(field, r0, c, entries)

    @staticmethod
    def block_diag(field: FieldSpec, blocks: Sequence["Mat"]) -> "Mat":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        entries = []
        r0 = c0 = 0
        for b in blocks:
            entries.extend((r0 + i, c0 + j, x) for i, j, x in b.nonzero_entries())
            r0 += b.rows
            c0 += b.cols
        return Mat.from_entries(field, rows, cols, entries)


# ---------------------------------------------------------------------------
# subspaces and quotients


@dataclass(frozen=True, eq=False)
class SubspaceInclusion:
    """A subspace given by a full-column-rank basis matrix."""

    ambient_dim: int
    basis: Mat

    @property
    def dim(self) -> int:
        return self.basis.cols

    @cached_property
    def left_inverse(self) -> Mat:
        """``L`` with ``L @ basis == I``: invert the basis on a set of pivot rows."""
        b = self.basis
        f = b.field
        if b.cols == 0:
            return Mat.zeros(f, 0, self.ambient_dim)
        pivots = pivot_columns(b.T)
        square = b.submatrix(pivots, range(b.cols))
        select = Mat.from_entries(f, len(pivots), self.ambient_dim, [(k, p, 1) for k, p in enumerate(pivots)])
        return square.inverse() @ select

    def coordinates(self, v: Mat) -> Mat:
        """Coordinates of the columns of ``v``; raises if some column is not in the subspace."""
        c = self.left_inverse @ v
        if self.basis @ c != v:
            raise ValueError("vector not in subspace")
        return c

    def contains(self, v: Mat) -> bool:
        return self.basis @ (self.left_inverse @ v) == v


@dataclass(frozen=True, eq=False)
class QuotientProjection:
    """A quotient map ``proj`` with a chosen section, ``proj @ section == I``."""

    source_dim: int
    proj: Mat
    section: Mat

    @property
    def dim(self) -> int:
        return self.proj.rows


def pivot_columns(m: Mat) -> list[int]:
    return _pivots(*m.rref())


def _pivots(r: Mat, rank: int) -> list[int]:
    """Pivot columns of a matrix already in RREF; pivots strictly increase along rows."""
    pivots = []
    j = 0
    for i in range(rank):
        while r[i, j] == 0:
            j += 1
        pivots.append(j)
        j += 1
    return pivots


EXACT_PRODUCT_LIMIT = 5_000_000


def product_is_zero(a: Mat, b: Mat, seed: int = 0) -> bool:
    """Whether ``a @ b == 0``.

    Large products are tested by Freivalds' method, ``a @ (b @ v)`` for random
    ``v``: exact arithmetic, one-sided, with false "zero" probability below 2^-64.
    """
    if a.rows * a.cols * b.cols <= EXACT_PRODUCT_LIMIT:
        return (a @ b).is_zero()
    f = a.field
    rng = random.Random(seed)
    if f.p == 0:
        bound, trials = 2**32, 2
    else:
        bound, trials = f.p, max(1, math.ceil(64 / math.log2(f.p)))
    v = Mat(f, b.cols, trials, [rng.randrange(bound) for _ in range(b.cols * trials)])
    return (a @ (b @ v)).is_zero()


def _kernel_from_rref(r: Mat, rank: int, n: int) -> tuple[Mat, list[int]]:
    pivots = _pivots(r, rank)
    pset = set(pivots)
    free = [j for j in range(n) if j not in pset]
    entries = []
    for k, fj in enumerate(free):
        entries.append((fj, k, 1))
        for i, pj in enumerate(pivots):
            x = r[i, fj]
            if x != 0:
                entries.append((pj, k, -x))
    return Mat.from_entries(r.field, n, len(free), entries), free


def kernel(m: Mat) -> SubspaceInclusion:
    """Null space of ``m``; one basis vector per free column of the RREF."""
    n = m.cols
    basis, _ = _kernel_from_rref(*m.rref(), n)
    return SubspaceInclusion(n, basis)


def cokernel(m: Mat) -> QuotientProjection:
    """Cokernel of ``m`` with coordinates on the pivot-free positions of rref(m^T).

    The projection is a kernel basis of ``m^T``, transposed; the section sends
    coordinate ``a`` to the ``a``-th free position.
    """
    n = m.rows
    ker, free = _kernel_from_rref(*m.T.rref(), n)
    section = Mat.from_entries(m.field, n, len(free), [(fj, a, 1) for a, fj in enumerate(free)])
    return QuotientProjection(n, ker.T, section)


def solve(a: Mat, b: Mat) -> Mat | None:
    """Some ``x`` with ``a @ x == b``, or None when the system is inconsistent."""
    aug = Mat.hstack(a.field, [a, b], rows=a.rows)
    r, rank = aug.rref()
    pivots = _pivots(r, rank)
    if any(p >= a.cols for p in pivots):
        return None
    entries = [(p, j, r[i, a.cols + j]) for i, p in enumerate(pivots) for j in range(b.cols)]
    return Mat.from_entries(a.field, a.cols, b.cols, entries)


# ---------------------------------------------------------------------------
# tensor, dual, hom


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product, left factor's index slowest."""
    a._check(b)
    f = a.field
    ea = a.nonzero_entries()
    eb = b.nonzero_entries()
    return Mat.from_entries(
        f, a.rows * b.rows, a.cols * b.cols,
        [(i * b.rows + k, j * b.cols + l, x * y) for i, j, x in ea for k, l, y in eb],
    )


def kron_all(field: FieldSpec, mats: Sequence[Mat]) -> Mat:
    return reduce(kron, mats, Mat.identity(field, 1))


def dual_map(m: Mat) -> Mat:
    return m.T


def hom_iso(field: FieldSpec, v_dim: int, w_dim: int) -> Mat:
    """``V* (x) W -> [V, W]``: sends ``v_i* (x) w_j`` to the matrix unit ``E_{j,i}``.

    Source position ``i * w_dim + j``, target position ``j * v_dim + i``.
    """
    n = v_dim * w_dim
    return Mat.from_entries(field, n, n, [(j * v_dim + i, i * w_dim + j, 1) for i in range(v_dim) for j in range(w_dim)])


def is_iso(m: Mat) -> bool:
    return m.rows == m.cols and m.rank() == m.rows


def permutation_matrix(field: FieldSpec, perm: Sequence[int]) -> Mat:
    """Column ``j`` goes to row ``perm[j]``."""
    n = len(perm)
    return Mat.from_entries(field, n, n, [(perm[j], j, 1) for j in range(n)])


def tensor_permutation(field: FieldSpec, dims: Sequence[int], order: Sequence[int]) -> Mat:
    """Reorder tensor factors: ``V_0 (x) ... (x) V_{n-1} -> V_{order[0]} (x) ... ``.

    ``order[k]`` names the source factor placed at position ``k``.
    """
    dims = list(dims)
    new_dims = [dims[o] for o in order]
    total = 1
    for d in dims:
        total *= d
    perm = [0] * total
    for src in range(total):
        idx = []
        r = src
        for d in reversed(dims):
            idx.append(r % d)
            r //= d
        idx.reverse()
        new_idx = [idx[o] for o in order]
        tgt = 0
        for x, d in zip(new_idx, new_dims):
            tgt = tgt * d + x
        perm[src] = tgt
    return permutation_matrix(field, perm)


def direct_sum_embedding(field: FieldSpec, dims: Sequence[int], k: int) -> Mat:
    """Inclusion of the ``k``-th summand of ``(+)_i V_i``."""
    off = sum(dims[:k])
    return Mat.from_entries(field, sum(dims), dims[k], [(off + i, i, 1) for i in range(dims[k])])


def offsets(dims: Sequence[int]) -> list[int]:
    out, acc = [], 0
    for d in dims:
        out.append(acc)
        acc += d
    return out


# ---------------------------------------------------------------------------
# JSON


def mat_to_json(m: Mat) -> dict:
    f = m.field
    return {"rows": m.rows, "cols": m.cols, "entries": [[i, j, f.serialize(x)] for i, j, x in m.nonzero_entries()]}


def mat_from_json(field: FieldSpec, doc: dict) -> Mat:
    return Mat.from_entries(field, int(doc["rows"]), int(doc["cols"]), [(int(i), int(j), field(x)) for i, j, x in doc["entries"]])
