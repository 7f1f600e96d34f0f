import numpy as np
from hypothesis import given, settings, strategies as st

from stabsat import gf2


@settings(max_examples=60)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 31))
def test_solve_consistent(r, c, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, (r, c)).astype(bool)
    x = rng.integers(0, 2, c).astype(bool)
    b = gf2.matmul(a, x[:, None])[:, 0]
    sol = gf2.solve(a, b)
    assert sol is not None
    assert np.array_equal(gf2.matmul(a, sol[:, None])[:, 0], b)


def test_solve_inconsistent():
    a = np.array([[1, 0], [1, 0]], dtype=bool)
    assert gf2.solve(a, np.array([1, 0], dtype=bool)) is None


def test_rank():
    assert gf2.rank(np.eye(4, dtype=bool)) == 4
    assert gf2.rank(np.array([[1, 1], [1, 1]], dtype=bool)) == 1
