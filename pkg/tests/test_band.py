import numpy as np
import pytest

from mobilium.band import BandWindow, GuardViolation, commutator_diag, paths_sum
from mobilium.laurent import Laurent


def dense(B):
    return np.array([[B[i, j] for j in range(B.size)] for i in range(B.size)], dtype=float)


def window(size, lower, upper, seed):
    rng = np.random.default_rng(seed)
    vals = rng.integers(-3, 4, size=(size, size))
    return BandWindow.from_function(size, lower, upper, lambda i, j: int(vals[i, j]), 0, 1)


def test_product_matches_dense_product():
    A, B = window(8, 1, 2, 0), window(8, 2, 1, 1)
    C = A.matmul(B)
    ref = dense(A) @ dense(B)
    assert C.lower == 3 and C.upper == 3
    # entries near the far edge miss terms from outside the window
    for i in range(8 - 3):
        for j in range(8 - 3):
            assert C[i, j] == ref[i, j]


def test_power_entry_agrees_with_path_sum():
    A = window(7, 1, 1, 2)
    for i, j in [(0, 0), (1, 2), (2, 0)]:
        assert A.power_entry(3, i, j) == paths_sum(A, 3, i, j)


def test_commutator_beyond_trusted_interior_is_refused():
    A = window(6, 1, 1, 3).with_guard(2)
    with pytest.raises(GuardViolation):
        commutator_diag(A, A, limit=6)


def test_laurent_arithmetic_and_evaluation():
    X = Laurent({1: 1, -1: 0.25})
    sq = X * X
    assert sq[0] == pytest.approx(0.5)
    assert sq(2.0) == pytest.approx(X(2.0) ** 2)
    assert X.derivative()[-2] == pytest.approx(-0.25)
    assert X.shift(2).low == 1
