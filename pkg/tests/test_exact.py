from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from booleq.exact import (
    ExactMatrix,
    Inconsistent,
    QuadScalar,
    Singular,
    determinant,
    exact_int_matmul,
    fraction_to_str,
    invert_matrix,
    kron,
    nullspace_basis,
    parse_fraction,
    rank,
    scalar_from_json,
    scalar_to_json,
    scaled_integer_array,
    solve_linear,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def test_invert_examples():
    assert invert_matrix(ExactMatrix.identity(2)) == ExactMatrix.identity(2)
    inv = invert_matrix(ExactMatrix([[4, 2], [2, 2]]))
    assert inv == ExactMatrix([[F(1, 2), F(-1, 2)], [F(-1, 2), 1]])
    with pytest.raises(Singular):
        invert_matrix(ExactMatrix([[1, 1], [1, 1]]))


def test_solve_examples():
    assert solve_linear(ExactMatrix.identity(2), (2, 3)) == [2, 3]
    assert solve_linear(ExactMatrix([[4, 2], [2, 2]]), (2, 2)) == [0, 1]
    with pytest.raises(Inconsistent):
        solve_linear(ExactMatrix([[1, 1], [1, 1]]), (1, 0))


def test_nullspace_examples():
    assert nullspace_basis(ExactMatrix.identity(3)) == []
    (v,) = nullspace_basis(ExactMatrix([[1, -1]]))
    assert v[0] == v[1] != 0
    # H - Id for the rank-one projection onto the all-ones vector
    M = ExactMatrix([[F(1, 3) - (r == c) for c in range(3)] for r in range(3)])
    (v,) = nullspace_basis(M)
    assert v[0] == v[1] == v[2] != 0


@given(square(3))
def test_inverse_is_two_sided(rows):
    A = ExactMatrix(rows)
    if determinant(A) == 0:
        with pytest.raises(Singular):
            invert_matrix(A)
        return
    B = invert_matrix(A)
    assert A @ B == ExactMatrix.identity(3) == B @ A


@given(square(3), st.lists(small, min_size=3, max_size=3))
def test_solve_satisfies_system(rows, rhs):
    A = ExactMatrix(rows)
    try:
        x = solve_linear(A, rhs)
    except Inconsistent:
        assert rank(A) < 3
        return
    assert list(A @ x) == [F(v) for v in rhs]


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=2, max_size=3))
def test_rank_nullity(rows):
    A = ExactMatrix(rows)
    basis = nullspace_basis(A)
    assert rank(A) + len(basis) == 4
    for v in basis:
        assert all(c == 0 for c in A @ v)


def test_kron_shape_and_values():
    A = ExactMatrix([[1, 2], [3, 4]])
    K = kron(A, ExactMatrix.identity(2))
    assert (K.rows, K.cols) == (4, 4)
    assert K[2, 0] == 3 and K[2, 1] == 0 and K[3, 1] == 3


def test_quadscalar_arithmetic():
    r = QuadScalar.sqrt(8)
    assert r.radicand == 2 and r.rad == 2
    assert (r * r).to_fraction() == 8
    assert QuadScalar.sqrt(F(9, 4)).to_fraction() == F(3, 2)
    golden = (QuadScalar.sqrt(5) + 1) / 2
    assert (golden * golden - golden).to_fraction() == 1
    assert QuadScalar.sqrt(2) > F(141, 100)


def test_json_roundtrip():
    assert fraction_to_str(F(-3, 6)) == "-1/2"
    assert parse_fraction("-1/2") == F(-1, 2)
    q = QuadScalar(F(1, 2), F(3), 7)
    assert scalar_from_json(scalar_to_json(q)) == q
    assert scalar_from_json(scalar_to_json(F(2, 3))) == F(2, 3)


def test_scaled_integer_array_and_matmul():
    arr, d = scaled_integer_array([[F(1, 2), F(1, 3)], [1, 0]])
    assert d == 6 and arr.tolist() == [[3, 2], [6, 0]]
    big = np.array([[2 ** 40]], dtype=np.int64)
    assert int(exact_int_matmul(big, big)[0, 0]) == 2 ** 80
