from fractions import Fraction

import pytest

from booleq.partitions import Category, SetPartition, enumerate_category, enumerate_interval
from booleq.posets import NotAnElement, PartitionPoset, category_poset, interval_poset, mobius, zeta


def sizes(*s):
    return SetPartition.from_sizes(s)


def test_zeta_examples():
    p = sizes(2, 1)
    assert zeta(p, p) == 1
    assert zeta(sizes(1, 1), sizes(2)) == 1
    assert zeta(sizes(2, 1), sizes(1, 2)) == 0


def test_mobius_examples():
    assert mobius(sizes(2, 1), sizes(2, 1)) == 1
    assert mobius(sizes(1, 1), sizes(2)) == -1
    assert mobius(sizes(1, 1, 1), sizes(3)) == 1


@pytest.mark.parametrize("k", range(1, 7))
def test_mobius_inverts_zeta(k):
    P = interval_poset(k)
    els = P.elements
    for a in els:
        for b in els:
            s = sum((P.zeta(a, c) * P.mobius(c, b) for c in els), Fraction(0))
            assert s == (a == b)


@pytest.mark.parametrize("k", range(1, 7))
def test_mobius_closed_form(k):
    P = interval_poset(k)
    for a in P.elements:
        for b in P.elements:
            expected = (-1) ** (a.num_blocks - b.num_blocks) if a.leq(b) else 0
            assert P.mobius(a, b) == expected


@pytest.mark.parametrize("x", list(Category))
def test_category_mobius_is_restriction(x):
    for k in range(1, 7):
        if not enumerate_category(x, k):
            continue
        sub, full = category_poset(x, k), interval_poset(k)
        for a in sub.elements:
            for b in sub.elements:
                assert sub.mobius(a, b) == (full.mobius(a, b) if a.leq(b) else 0)


def test_non_member_rejected():
    P = category_poset("o", 4)
    with pytest.raises(NotAnElement):
        P.mobius(sizes(4), sizes(4))


def test_interval_and_below():
    P = interval_poset(3)
    assert set(P.interval(sizes(1, 1, 1), sizes(3))) == set(enumerate_interval(3))
    assert set(P.below(sizes(2, 1))) == {sizes(2, 1), sizes(1, 1, 1)}


def test_custom_poset_requires_elements():
    with pytest.raises(ValueError):
        PartitionPoset([])
