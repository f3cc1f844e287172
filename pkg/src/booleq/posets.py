"""Zeta and Moebius functions on finite posets of partitions (refinement order)."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .partitions import Category, SetPartition, enumerate_category, enumerate_interval


class NotAnElement(KeyError):
    """A partition outside the poset was passed to zeta or mobius."""


class PartitionPoset:
    """A finite set of partitions of ``[k]`` ordered by refinement.

    The Moebius function is computed from its defining recursion

        mu(p, p) = 1,    mu(p, q) = - sum_{p <= r < q} mu(p, r),

    and memoised per pair.  The memo only ever gains entries whose value is
    fully determined, so sharing a poset between threads gives the same
    answers regardless of interleaving.
    """

    def __init__(self, elements: Iterable[SetPartition]):
        elems = tuple(elements)
        if not elems:
            raise ValueError("poset must be nonempty")
        k = elems[0].k
        if any(e.k != k for e in elems):
            raise ValueError("all elements must partition the same ground set")
        if len(set(elems)) != len(elems):
            raise ValueError("elements must be distinct")
        self.k = k
        self.elements = elems
        self.index = {e: i for i, e in enumerate(elems)}
        m = len(elems)
        self._le = [[elems[a].leq(elems[b]) for b in range(m)] for a in range(m)]
        self._mu: dict[tuple[int, int], int] = {}

    def __len__(self):
        return len(self.elements)

    def __contains__(self, p):
        return p in self.index

    def _idx(self, p: SetPartition) -> int:
        try:
            return self.index[p]
        except KeyError:
            raise NotAnElement(f"{p} is not an element of this poset") from None

    def zeta(self, p1: SetPartition, p2: SetPartition) -> int:
        return int(self._le[self._idx(p1)][self._idx(p2)])

    def mobius(self, p1: SetPartition, p2: SetPartition) -> Fraction:
        return Fraction(self._mobius_idx(self._idx(p1), self._idx(p2)))

    def _mobius_idx(self, a: int, b: int) -> int:
        if not self._le[a][b]:
            return 0
        key = (a, b)
        if key in self._mu:
            return self._mu[key]
        if a == b:
            val = 1
        else:
            # the elements of [a, b) form an interval, so process them
            # bottom-up to keep the recursion shallow
            le = self._le
            inner = [r for r in range(len(self.elements)) if le[a][r] and le[r][b] and r != b]
            inner.sort(key=lambda r: -self.elements[r].num_blocks)
            val = -sum(self._mobius_idx(a, r) for r in inner)
        self._mu[key] = val
        return val

    def interval(self, p1: SetPartition, p2: SetPartition) -> list[SetPartition]:
        a, b = self._idx(p1), self._idx(p2)
        return [e for r, e in enumerate(self.elements) if self._le[a][r] and self._le[r][b]]

    def below(self, p: SetPartition) -> list[SetPartition]:
        b = self._idx(p)
        return [e for r, e in enumerate(self.elements) if self._le[r][b]]


@lru_cache(maxsize=None)
def interval_poset(k: int) -> PartitionPoset:
    """The poset ``I(k)`` of all interval partitions."""
    return PartitionPoset(enumerate_interval(k))


@lru_cache(maxsize=None)
def category_poset(x, k: int) -> PartitionPoset:
    """The poset ``D(k)`` for a category tag; raises ``ValueError`` if empty."""
    return PartitionPoset(enumerate_category(Category.parse(x), k))


def zeta(p1: SetPartition, p2: SetPartition, poset: PartitionPoset | None = None) -> int:
    """``zeta(p1, p2)``; with no poset given, just the refinement indicator."""
    if poset is None:
        return int(p1.leq(p2))
    return poset.zeta(p1, p2)


def mobius(p1: SetPartition, p2: SetPartition, poset: PartitionPoset | None = None) -> Fraction:
    """Moebius function, by default on the interval partitions ``I(k)``."""
    if poset is None:
        poset = interval_poset(p1.k)
    return poset.mobius(p1, p2)
