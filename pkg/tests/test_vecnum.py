import numpy as np
import pytest

from src.numerics.vecnum import (
    NonFiniteError,
    ShapeError,
    dot,
    identity,
    matmul,
    matrix,
    matvec,
    norm,
    outer,
    transpose,
    vector,
)


def test_norm_examples():
    assert norm(vector([3, 4])) == 5.0
    assert round(norm(vector([1, 2, 3])), 6) == 3.741657
    assert norm(vector([1, -2, 3]), p=1) == 6.0
    assert norm(vector([0, 0, 0])) == 0.0


def test_norm_rejects_other_orders():
    with pytest.raises(ValueError):
        norm(vector([1, 2]), p=3)


def test_dot_examples():
    assert dot(vector([1, 0]), vector([0, 1])) == 0.0
    assert dot(vector([1, 2]), vector([3, 4])) == 11.0
    assert dot(vector([1, 2, 3]), vector([1, 2, 3])) == 14.0


def test_dot_dimension_mismatch():
    with pytest.raises(ShapeError):
        dot(vector([1, 2]), vector([1, 2, 3]))


def test_linear_algebra_plumbing():
    np.testing.assert_array_equal(matvec(identity(2), vector([5, 7])), [5, 7])
    np.testing.assert_array_equal(matvec(outer(vector([1, 0]), vector([0, 1])), vector([0, 1])), [1, 0])

    m = matrix([[1, 2, 3], [4, 5, 6]])
    np.testing.assert_array_equal(transpose(transpose(m)), m)
    np.testing.assert_array_equal(matmul(m, transpose(m)), [[14, 32], [32, 77]])


def test_shape_mismatches_raise():
    with pytest.raises(ShapeError):
        matvec(matrix([[1, 2], [3, 4]]), vector([1, 2, 3]))
    with pytest.raises(ShapeError):
        matmul(matrix([[1, 2]]), matrix([[1, 2]]))
    with pytest.raises(ShapeError):
        matrix([1, 2, 3], n_rows=2, n_cols=2)


def test_constructors_validate_and_freeze():
    with pytest.raises(NonFiniteError):
        vector([1.0, float("nan")])
    with pytest.raises(NonFiniteError):
        matrix([[1.0, float("inf")]])
    with pytest.raises(ShapeError):
        vector([])

    v = vector([1, 2])
    with pytest.raises(ValueError):
        v[0] = 3.0
    assert matrix([1, 2, 3, 4, 5, 6], n_rows=2, n_cols=3).shape == (2, 3)


def test_norm_dot_consistency_and_inequalities():
    rng = np.random.default_rng(11)
    for _ in range(300):
        d = int(rng.integers(1, 4097))
        x = rng.normal(size=d) * rng.uniform(0.01, 10)
        y = rng.normal(size=d) * rng.uniform(0.01, 10)
        nx, ny = norm(x), norm(y)
        assert abs(nx**2 - dot(x, x)) <= 1e-12 * dot(x, x)
        assert norm(x + y) <= (nx + ny) * (1 + 1e-12) + 1e-12
        assert abs(dot(x, y)) <= nx * ny * (1 + 1e-12) + 1e-12
