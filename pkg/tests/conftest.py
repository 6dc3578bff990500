import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from coendkit.linalg import FieldSpec, Mat

settings.register_profile(
    "repo", deadline=None, max_examples=40, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

FIELDS = [FieldSpec(0), FieldSpec(2), FieldSpec(5)]


@pytest.fixture(params=FIELDS, ids=str)
def field(request):
    return request.param


def matrices(f: FieldSpec, max_rows=5, max_cols=5, lo=-3, hi=3):
    """Small integer matrices coerced into ``f``; also returns the raw rows."""

    @st.composite
    def build(draw):
        r = draw(st.integers(0, max_rows))
        c = draw(st.integers(0, max_cols))
        rows = [[draw(st.integers(lo, hi)) for _ in range(c)] for _ in range(r)]
        return Mat.from_rows(f, rows, c), rows

    return build()


@pytest.fixture
def rng():
    return random.Random(20240611)
