from itertools import product

import pytest
from hypothesis import given, strategies as st

from booleq.partitions import (
    Category,
    EmptyDownSet,
    GroundMismatch,
    SetPartition,
    check_block_stable,
    check_enough_partitions,
    check_interval_closed,
    check_join_stable,
    enumerate_category,
    enumerate_interval,
    inf_bruteforce,
    inf_category,
    join,
    kernel,
    kernel_representatives,
    leq,
    multi_indices,
    tensor,
)

P = SetPartition


def sizes(*s):
    return SetPartition.from_sizes(s)


interval_sizes = st.lists(st.integers(1, 3), min_size=1, max_size=4)
multi_index = st.lists(st.integers(1, 3), min_size=1, max_size=6)


def test_enumerate_interval_examples():
    assert enumerate_interval(1) == (P([[1]]),)
    assert set(enumerate_interval(3)) == {sizes(3), sizes(2, 1), sizes(1, 2), sizes(1, 1, 1)}
    assert len(enumerate_interval(6)) == 32


def test_enumerate_category_examples():
    assert enumerate_category("o", 4) == (sizes(2, 2),)
    assert enumerate_category("h", 4) == (sizes(4), sizes(2, 2))
    assert set(enumerate_category("b", 3)) == {sizes(1, 1, 1), sizes(2, 1), sizes(1, 2)}
    assert enumerate_category("o", 3) == ()


@pytest.mark.parametrize("k", range(1, 11))
def test_interval_count_and_order(k):
    ps = enumerate_interval(k)
    assert len(ps) == 2 ** (k - 1) == len(set(ps))
    assert list(ps) == sorted(ps, key=lambda p: p.sort_key())
    assert all(p.is_interval for p in ps)


def test_tensor_examples():
    assert tensor(P([[1, 2]]), P([[1]])) == P([[1, 2], [3]])
    assert tensor(sizes(2), sizes(2)) == sizes(2, 2)
    assert tensor(sizes(2), sizes(3)) == P([[1, 2], [3, 4, 5]])


def test_order_and_join_examples():
    assert leq(sizes(1, 1, 1), sizes(3))
    assert not leq(sizes(2, 1), sizes(1, 2))
    assert join(sizes(2, 1), sizes(1, 2)) == sizes(3)
    assert join(sizes(1, 1), sizes(2)) == sizes(2)
    with pytest.raises(GroundMismatch):
        leq(sizes(1), sizes(2))


def test_kernel_examples():
    assert kernel((1, 1, 2)) == sizes(2, 1)
    assert kernel((1, 2, 1)) == P([[1, 3], [2]])
    assert kernel((4, 4, 4, 4)) == sizes(4)


def test_inf_examples():
    assert inf_category("s", P([[1, 3], [2]])) == sizes(1, 1, 1)
    assert inf_category("s", sizes(4)) == sizes(4)
    assert inf_category("h", kernel((1, 1, 2, 2))) == sizes(2, 2)
    with pytest.raises(EmptyDownSet):
        inf_category("o", kernel((1, 2)))
    with pytest.raises(ValueError):
        inf_category("b", sizes(2, 1))


@given(multi_index)
def test_kernel_is_partition_of_equal_entries(j):
    kj = kernel(j)
    for a, b in product(range(len(j)), repeat=2):
        assert (kj.labels[a] == kj.labels[b]) == (j[a] == j[b])


@given(multi_index)
def test_inf_matches_bruteforce(j):
    sigma = kernel(j)
    for x in (Category.S, Category.O, Category.H):
        try:
            fast = inf_category(x, sigma)
        except EmptyDownSet:
            assert not any(p.leq(sigma) for p in enumerate_category(x, len(j)))
            continue
        assert fast == inf_bruteforce(x, sigma)
        assert fast.leq(sigma) and x.contains(fast)


@given(interval_sizes, interval_sizes)
def test_join_is_least_upper_bound(s1, s2):
    if sum(s1) != sum(s2):
        return
    a, b = sizes(*s1), sizes(*s2)
    j = a.join(b)
    assert a.leq(j) and b.leq(j)
    assert j.is_interval
    for c in enumerate_interval(a.k):
        if a.leq(c) and b.leq(c):
            assert j.leq(c)


@given(interval_sizes)
def test_leq_partial_order_axioms(s):
    a = sizes(*s)
    assert a.leq(a)
    for b in enumerate_interval(a.k):
        if a.leq(b) and b.leq(a):
            assert a == b


@given(interval_sizes, interval_sizes)
def test_tensor_is_associative_and_respects_categories(s1, s2):
    a, b = sizes(*s1), sizes(*s2)
    assert tensor(tensor(a, b), a) == tensor(a, tensor(b, a))
    for x in Category:
        if x.contains(a) and x.contains(b):
            assert x.contains(tensor(a, b))


@pytest.mark.parametrize("x", list(Category))
def test_blockwise_conditions(x):
    for k in range(1, 8):
        assert check_block_stable(x, k)
        assert check_interval_closed(x, k)
    assert check_enough_partitions(x, 8)


@pytest.mark.parametrize("x", ["s", "o", "h"])
def test_join_stable(x):
    assert Category.parse(x).join_stable
    for k in range(1, 8):
        assert check_join_stable(x, k) == []


def test_b_not_join_stable():
    assert not Category.B.join_stable
    bad = check_join_stable("b", 3)
    assert (sizes(2, 1), sizes(1, 2)) in bad
    assert not Category.B.contains(sizes(2, 1).join(sizes(1, 2)))


def test_l_sets():
    assert Category.S.L(5) == [1, 2, 3, 4, 5]
    assert Category.O.L(5) == [2]
    assert Category.H.L(6) == [2, 4, 6]
    assert Category.B.L(5) == [1, 2]


@pytest.mark.parametrize("k,n", [(3, 2), (4, 3), (5, 5)])
def test_kernel_representatives_cover_all_kernels(k, n):
    reps = kernel_representatives(k, max_blocks=n)
    kernels = {kernel(r) for r in reps}
    assert len(kernels) == len(reps)
    assert kernels == {kernel(j) for j in multi_indices(n, k)}


def test_json_and_str():
    p = P([[1, 3], [2]])
    assert p.to_json() == [[1, 3], [2]]
    assert SetPartition.from_json(p.to_json()) == p
    assert str(sizes(2, 1)) == "{12}{3}"
