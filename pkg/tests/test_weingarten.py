from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from booleq.exact import ExactMatrix, Singular
from booleq.partitions import Category, SetPartition, enumerate_category, kernel, multi_indices
from booleq.weingarten import (
    EmptyCategory,
    ProjectionOracle,
    fixed_space,
    gram,
    haar_lemma_check,
    in_span,
    invertibility_threshold,
    is_idempotent,
    partition_vector,
    projection_entry,
    projection_equivalence,
    projection_matrix,
    projection_oracle,
    row_sum_identity,
    weingarten,
    weingarten_estimate_residual,
)

A = SetPartition.from_sizes((1, 1))  # {1}{2}
B = SetPartition.from_sizes((2,))    # {12}
PAIR = B


def by_label(x, k, M):
    members = enumerate_category(x, k)
    return {(str(p), str(q)): M[a, b] for a, p in enumerate(members) for b, q in enumerate(members)}


@pytest.mark.parametrize("n", range(2, 7))
def test_gram_and_weingarten_s2(n):
    G = by_label("s", 2, gram("s", 2, n))
    assert G[str(A), str(A)] == n * n
    assert G[str(A), str(B)] == G[str(B), str(A)] == G[str(B), str(B)] == n
    W = by_label("s", 2, weingarten("s", 2, n))
    assert W[str(A), str(A)] == F(1, n * (n - 1))
    assert W[str(A), str(B)] == W[str(B), str(A)] == F(-1, n * (n - 1))
    assert W[str(B), str(B)] == F(1, n - 1)


def test_gram_o2_and_singular():
    assert gram("o", 2, 5).to_json() == [["5/1"]]
    assert weingarten("o", 2, 5).to_json() == [["1/5"]]
    with pytest.raises(Singular):
        weingarten("s", 2, 1)
    with pytest.raises(EmptyCategory):
        gram("o", 3, 3)


@pytest.mark.parametrize("x", ["s", "o", "h", "b"])
def test_gram_diagonal(x):
    for k in (2, 4):
        G = gram(x, k, 3)
        for a, p in enumerate(enumerate_category(x, k)):
            assert G[a, a] == 3 ** p.num_blocks


@pytest.mark.parametrize("n", range(2, 6))
def test_projection_examples(n):
    assert all(projection_entry("s", 1, n, (a,), (b,)) == F(1, n)
               for a in range(1, n + 1) for b in range(1, n + 1))
    assert projection_entry("s", 2, n, (1, 1), (2, 2)) == F(1, n)
    assert projection_entry("s", 2, n, (1, 2), (1, 2)) == F(1, n * (n - 1))
    assert projection_oracle("s", 1, n, (1,), (2,)) == F(1, n)
    for i, j in product(multi_indices(n, 2), repeat=2):
        assert projection_oracle("h", 2, n, i, j) == projection_oracle("o", 2, n, i, j)


@pytest.mark.parametrize("x,k,n", [("s", 2, 3), ("s", 3, 2), ("o", 4, 2), ("h", 4, 3), ("b", 3, 3)])
def test_projection_entry_equals_oracle_directly(x, k, n):
    O = ProjectionOracle(x, k, n)
    for i, j in product(multi_indices(n, k), repeat=2):
        assert projection_entry(x, k, n, i, j) == O.entry(i, j)


@pytest.mark.parametrize("x,k,n", [("s", 3, 4), ("o", 4, 3), ("h", 4, 4), ("b", 4, 3)])
def test_projection_equivalence(x, k, n):
    assert projection_equivalence(x, k, n)


def test_projection_equivalence_detects_a_wrong_table():
    P = projection_matrix(Category.S, 2, 3)
    saved = P.table
    rows = [list(r) for r in saved.entries]
    rows[0][0] += 1
    try:
        P.table = ExactMatrix(rows)
        assert not projection_equivalence("s", 2, 3)
    finally:
        P.table = saved
    assert projection_equivalence("s", 2, 3)


def test_thresholds():
    assert invertibility_threshold("s", 1) == 1
    assert invertibility_threshold("s", 3) == 2
    assert invertibility_threshold("o", 4) == 1
    assert invertibility_threshold("h", 2) == 1
    assert invertibility_threshold("h", 4) == 2
    assert invertibility_threshold("o", 3) is None


@pytest.mark.parametrize("x,k,n", [("s", 2, 3), ("s", 3, 3), ("o", 2, 4), ("h", 4, 2), ("b", 3, 2)])
def test_idempotent_and_fixed_space(x, k, n):
    assert is_idempotent(x, k, n)
    basis = fixed_space(x, k, n)
    members = enumerate_category(x, k)
    assert len(basis) == len(members)
    for p in members:
        assert in_span(basis, list(partition_vector(p, n)))


def test_fixed_space_examples():
    (v,) = fixed_space("s", 1, 4)
    assert len(set(v)) == 1
    (v,) = fixed_space("o", 2, 3)
    t = partition_vector(PAIR, 3)
    assert all((c != 0) == bool(e) for c, e in zip(v, t))


def test_partition_vector():
    v = partition_vector(PAIR, 3)
    assert v.sum() == 3
    assert np.nonzero(v)[0].tolist() == [0, 4, 8]


def test_weingarten_estimate_examples():
    for n in range(2, 20):
        for p in (A, B):
            for q in (A, B):
                assert weingarten_estimate_residual("s", 2, n, p, q) == F(1, n - 1)
        assert weingarten_estimate_residual("o", 2, n, PAIR, PAIR) == 0


@pytest.mark.parametrize("k", [2, 3])
def test_weingarten_estimate_decay(k):
    members = enumerate_category("s", k)
    for p in members:
        for q in members:
            r = [weingarten_estimate_residual("s", k, n, p, q) for n in (8, 16, 32)]
            assert r[1] <= F(3, 5) * r[0] and r[2] <= F(3, 5) * r[1]


@given(st.integers(2, 4), st.sampled_from(["s", "o", "h"]), st.data())
def test_row_sum_identity(n, x, data):
    k = 2
    members = enumerate_category(x, k)
    pi = data.draw(st.sampled_from(members))
    r = data.draw(st.tuples(*[st.integers(1, n)] * k))
    assert row_sum_identity(x, k, n, pi, r)


@pytest.mark.parametrize("n", range(2, 6))
def test_haar_lemma(n):
    for j in range(1, n + 1):
        assert haar_lemma_check("s", 1, 1, n, (j,))
    if n <= 4:
        assert haar_lemma_check("h", 2, 2, n, (1, 1))
        assert haar_lemma_check("o", 2, 2, n, (1, 2))


def test_entries_depend_only_on_kernels():
    P = projection_matrix("b", 3, 3)
    for i, j in product(multi_indices(3, 3), repeat=2):
        a, b = P.kernel_index[kernel(i)], P.kernel_index[kernel(j)]
        assert P.entry(i, j) == P.table[a, b]
