"""Set partitions of [k], interval partitions and the four interval categories.

Partitions are stored as general set partitions; being an interval partition
is a predicate.  That way ``ker j`` (usually not interval) and the category
members (always interval) share one type.

Elements of the ground set are 1-based throughout, as in the usual notation.
"""
from __future__ import annotations

import enum
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence


class GroundMismatch(ValueError):
    """Two partitions of different ground sets were compared or joined."""


class EmptyDownSet(ValueError):
    """No category element lies below the given partition."""


class SetPartition:
    """A partition of ``{1, ..., k}``.

    Blocks are kept as sorted tuples, ordered by their minimum, so two equal
    partitions are structurally equal.

    >>> SetPartition([[3, 1], [2]])
    SetPartition([[1, 3], [2]])
    """

    __slots__ = ("k", "blocks", "_labels", "_hash")

    def __init__(self, blocks: Iterable[Iterable[int]], k: int | None = None):
        bl = [tuple(sorted(int(x) for x in b)) for b in blocks]
        if any(not b for b in bl):
            raise ValueError("blocks must be nonempty")
        bl.sort(key=lambda b: b[0])
        elems = [x for b in bl for x in b]
        if k is None:
            k = len(elems)
        if k < 1:
            raise ValueError("ground size must be positive")
        if sorted(elems) != list(range(1, k + 1)):
            raise ValueError(f"blocks {bl} do not partition 1..{k}")
        self.k = k
        self.blocks = tuple(bl)
        labels = [0] * k
        for idx, b in enumerate(self.blocks):
            for x in b:
                labels[x - 1] = idx
        self._labels = tuple(labels)
        self._hash = hash(self.blocks)

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_labels(cls, labels: Sequence) -> "SetPartition":
        """Partition whose blocks are the level sets of ``labels``."""
        groups: dict = {}
        for pos, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(pos)
        return cls(groups.values(), k=len(labels))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "SetPartition":
        """Interval partition with consecutive blocks of the given sizes."""
        blocks, start = [], 1
        for s in sizes:
            if s < 1:
                raise ValueError("block sizes must be positive")
            blocks.append(range(start, start + s))
            start += s
        return cls(blocks, k=start - 1)

    @classmethod
    def one_block(cls, k: int) -> "SetPartition":
        return cls([range(1, k + 1)], k=k)

    @classmethod
    def singletons(cls, k: int) -> "SetPartition":
        return cls([[i] for i in range(1, k + 1)], k=k)

    @classmethod
    def from_json(cls, obj) -> "SetPartition":
        return cls(obj)

    # -- basic data -------------------------------------------------------

    @property
    def labels(self) -> tuple[int, ...]:
        """Block index of each element (0-based block numbering)."""
        return self._labels

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def is_interval(self) -> bool:
        return all(b[-1] - b[0] + 1 == len(b) for b in self.blocks)

    def sort_key(self):
        return (tuple(b[0] for b in self.blocks), self.blocks)

    def __eq__(self, other):
        if not isinstance(other, SetPartition):
            return NotImplemented
        return self.k == other.k and self.blocks == other.blocks

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "SetPartition"):
        return (self.k, self.sort_key()) < (other.k, other.sort_key())

    def __repr__(self):
        return f"SetPartition({[list(b) for b in self.blocks]})"

    def __str__(self):
        return "".join("{" + "".join(map(str, b)) + "}" if self.k < 10 else
                       "{" + ",".join(map(str, b)) + "}" for b in self.blocks)

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    # -- order and lattice ------------------------------------------------

    def _check_ground(self, other: "SetPartition") -> None:
        if self.k != other.k:
            raise GroundMismatch(f"ground sizes {self.k} and {other.k} differ")

    def leq(self, other: "SetPartition") -> bool:
        """Refinement order: every block of ``self`` lies in a block of ``other``."""
        self._check_ground(other)
        lab = other._labels
        return all(len({lab[x - 1] for x in b}) == 1 for b in self.blocks)

    __le__ = leq

    def join(self, other: "SetPartition") -> "SetPartition":
        """Least upper bound in the lattice of all set partitions."""
        self._check_ground(other)
        parent = list(range(self.k))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for part in (self, other):
            for b in part.blocks:
                r = find(b[0] - 1)
                for x in b[1:]:
                    parent[find(x - 1)] = r
        return SetPartition.from_labels([find(i) for i in range(self.k)])

    __or__ = join

    def tensor(self, other: "SetPartition") -> "SetPartition":
        """Horizontal concatenation; blocks of ``other`` are shifted by ``self.k``."""
        shifted = [[x + self.k for x in b] for b in other.blocks]
        return SetPartition(list(self.blocks) + shifted, k=self.k + other.k)

    def restrict(self, positions: Sequence[int]) -> "SetPartition":
        """Partition induced on ``positions`` (renumbered 1..len)."""
        return SetPartition.from_labels([self._labels[p - 1] for p in positions])


def tensor(p1: SetPartition, p2: SetPartition) -> SetPartition:
    return p1.tensor(p2)


def leq(p1: SetPartition, p2: SetPartition) -> bool:
    return p1.leq(p2)


def join(p1: SetPartition, p2: SetPartition) -> SetPartition:
    return p1.join(p2)


def kernel(j: Sequence[int]) -> SetPartition:
    """``ker j``: positions r, s share a block iff ``j_r == j_s``."""
    if len(j) == 0:
        raise ValueError("empty multi-index")
    return _kernel_cached(tuple(j))


@lru_cache(maxsize=200_000)
def _kernel_cached(j: tuple) -> SetPartition:
    return SetPartition.from_labels(j)


def pair_partition(k: int) -> SetPartition:
    """The pairing ``{12}{34}...`` of ``[2k]`` (the k-fold tensor power of the pair)."""
    return SetPartition.from_sizes([2] * k)


# ---------------------------------------------------------------------------
# categories
# ---------------------------------------------------------------------------


class Category(enum.Enum):
    """The four categories of interval partitions.

    Membership is decided blockwise through ``allows(size)``, i.e. through
    the set ``L_D`` of admissible block sizes.
    """

    S = "s"
    O = "o"
    H = "h"
    B = "b"

    @classmethod
    def parse(cls, tag) -> "Category":
        if isinstance(tag, Category):
            return tag
        try:
            return cls(str(tag).strip().lower())
        except ValueError:
            raise ValueError(f"unknown category {tag!r}; expected one of s, o, h, b") from None

    def allows(self, size: int) -> bool:
        """Whether ``size`` lies in ``L_D`` (the one-block partition of that size is in D)."""
        if size < 1:
            return False
        if self is Category.S:
            return True
        if self is Category.O:
            return size == 2
        if self is Category.H:
            return size % 2 == 0
        return size <= 2

    def L(self, upto: int) -> list[int]:
        return [m for m in range(1, upto + 1) if self.allows(m)]

    def contains(self, pi: SetPartition) -> bool:
        return pi.is_interval and all(self.allows(len(b)) for b in pi.blocks)

    @property
    def join_stable(self) -> bool:
        return self is not Category.B

    def __str__(self):
        return self.value


def _compositions(k: int):
    """Compositions of ``k`` in the order of their partial-sum sequence."""
    # a composition is fixed by the set of cut points in {1..k-1}
    for bits in product((0, 1), repeat=k - 1):
        sizes, run = [], 1
        for b in bits:
            if b:
                sizes.append(run)
                run = 1
            else:
                run += 1
        sizes.append(run)
        yield sizes


@lru_cache(maxsize=None)
def enumerate_interval(k: int) -> tuple[SetPartition, ...]:
    """All ``2**(k-1)`` interval partitions of ``[k]``, in canonical order.

    Canonical order is lexicographic on the sequence of block minima.
    """
    if k < 1:
        raise ValueError("k must be positive")
    parts = [SetPartition.from_sizes(c) for c in _compositions(k)]
    parts.sort(key=SetPartition.sort_key)
    return tuple(parts)


@lru_cache(maxsize=None)
def enumerate_category(x, k: int) -> tuple[SetPartition, ...]:
    """``D(k)`` for the category ``x``; may be empty (e.g. ``o`` with odd k)."""
    x = Category.parse(x)
    return tuple(p for p in enumerate_interval(k) if x.contains(p))


def inf_category(x, sigma: SetPartition) -> SetPartition:
    """Largest element of ``D(k)`` below ``sigma`` for ``x`` in ``{s, o, h}``.

    For ``s`` this merges maximal runs of consecutive positions that lie in
    the same block of ``sigma``.  For ``o`` and ``h`` the maximum is found by
    brute force over ``D(k)``.  ``b`` is rejected: its category is not
    join-stable, so a maximum need not exist.
    """
    x = Category.parse(x)
    if x is Category.B:
        raise ValueError("inf is not defined for category b (not join-stable)")
    if x is Category.S:
        return _inf_interval(sigma)
    return _inf_bruteforce(x, sigma)


@lru_cache(maxsize=100_000)
def _inf_interval(sigma: SetPartition) -> SetPartition:
    lab = sigma.labels
    sizes, run = [], 1
    for r in range(1, sigma.k):
        if lab[r] == lab[r - 1]:
            run += 1
        else:
            sizes.append(run)
            run = 1
    sizes.append(run)
    return SetPartition.from_sizes(sizes)


@lru_cache(maxsize=100_000)
def _inf_bruteforce(x: Category, sigma: SetPartition) -> SetPartition:
    below = [p for p in enumerate_category(x, sigma.k) if p.leq(sigma)]
    if not below:
        raise EmptyDownSet(f"no element of {x.value}({sigma.k}) lies below {sigma}")
    top = below[0]
    for p in below[1:]:
        top = top.join(p)
    # join-stability makes the join of the down-set an element of it
    if top not in below:
        raise ArithmeticError(f"down-set of {sigma} in {x.value} has no maximum")
    return top


def inf_bruteforce(x, sigma: SetPartition) -> SetPartition:
    """Brute-force maximum over ``D(k)`` below ``sigma`` (also used as an oracle for ``s``)."""
    return _inf_bruteforce(Category.parse(x), sigma)


# ---------------------------------------------------------------------------
# blockwise conditions
# ---------------------------------------------------------------------------


def check_block_stable(x, k: int) -> bool:
    """(D1): an interval partition is in D(k) iff each of its blocks, as a one-block
    partition, is in D(|V|)."""
    x = Category.parse(x)
    members = set(enumerate_category(x, k))
    for p in enumerate_interval(k):
        blockwise = all(SetPartition.one_block(len(b)) in set(enumerate_category(x, len(b)))
                        for b in p.blocks)
        if (p in members) != blockwise:
            return False
    return True


def check_interval_closed(x, k: int) -> bool:
    """(D2): every interval partition between two members is a member."""
    x = Category.parse(x)
    allp = enumerate_interval(k)
    members = [i for i, p in enumerate(allp) if x.contains(p)]
    mset = set(members)
    le = [[a.leq(b) for b in allp] for a in allp]
    for pi in members:
        for q in members:
            if not le[pi][q]:
                continue
            for r in range(len(allp)):
                if le[pi][r] and le[r][q] and r not in mset:
                    return False
    return True


def check_enough_partitions(x, kmax: int) -> bool:
    """(D3): if D(k+l) is nonempty for some k in L_D, then D(l) is nonempty.

    Checked for all ``l`` and ``k`` with ``k + l <= kmax``.
    """
    x = Category.parse(x)
    for l in range(1, kmax):
        for k in x.L(kmax - l):
            if enumerate_category(x, k + l) and not enumerate_category(x, l):
                return False
    return True


def check_join_stable(x, k: int) -> list[tuple[SetPartition, SetPartition]]:
    """Pairs of members of D(k) whose join leaves D(k) (empty iff join-stable at k)."""
    x = Category.parse(x)
    members = enumerate_category(x, k)
    bad = []
    for a in members:
        for b in members:
            if not x.contains(a.join(b)):
                bad.append((a, b))
    return bad


def multi_indices(n: int, k: int):
    """All of ``[n]^k`` in lexicographic order (1-based tuples)."""
    return product(range(1, n + 1), repeat=k)


def kernel_representatives(k: int, max_blocks: int | None = None) -> list[tuple[int, ...]]:
    """One multi-index per set partition of [k] (restricted growth strings, 1-based).

    With ``max_blocks`` set, only kernels with at most that many blocks appear;
    these are exactly the kernels realised in ``[n]^k`` for ``n = max_blocks``.
    """
    out: list[tuple[int, ...]] = []

    def rec(prefix, m):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        top = m + 1 if max_blocks is None else min(m + 1, max_blocks)
        for v in range(1, top + 1):
            rec(prefix + [v], max(m, v))

    rec([], 0)
    return out
