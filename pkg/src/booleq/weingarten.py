"""Gram and Weingarten matrices, the projection onto Span{T_pi} and related checks.

Notation: for a partition ``pi`` of ``[k]`` the vector ``T_pi`` in
``(C^n)^{(x) k}`` has coefficient 1 at ``e_j`` when ``pi <= ker j`` and 0
otherwise.  ``H`` is the orthogonal projection onto the span of the ``T_pi``
with ``pi`` in ``D(k)``.

Two independent routes to ``H`` live here:

* :func:`projection_entry` uses the Weingarten double sum over kernels;
* :func:`projection_oracle` builds the ``T_pi`` explicitly, forms their Gram
  matrix by brute force and solves the normal equations.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .exact import (
    ExactMatrix,
    Singular,
    determinant,
    exact_int_matmul,
    independent_columns,
    invert_matrix,
    nullspace_basis,
    scaled_integer_array,
    solve_linear,
)
from .partitions import (
    Category,
    SetPartition,
    enumerate_category,
    kernel,
    kernel_representatives,
    multi_indices,
)
from .posets import interval_poset

DEFAULT_MATERIALIZE_CAP = 4096


class EmptyCategory(ValueError):
    """``D(k)`` is empty, so there is nothing to build a Gram matrix from."""


def _members(x, k: int) -> tuple[SetPartition, ...]:
    members = enumerate_category(Category.parse(x), k)
    if not members:
        raise EmptyCategory(f"{Category.parse(x).value}({k}) is empty")
    return members


@lru_cache(maxsize=None)
def gram(x, k: int, n: int) -> ExactMatrix:
    """``G(pi, sigma) = n ** |pi v sigma|`` over ``D(k)``, join taken in all partitions."""
    members = _members(x, k)
    return ExactMatrix([[n ** p.join(q).num_blocks for q in members] for p in members])


@lru_cache(maxsize=None)
def weingarten(x, k: int, n: int) -> ExactMatrix:
    """Inverse of the Gram matrix; raises :class:`Singular` below the threshold."""
    try:
        return invert_matrix(gram(x, k, n))
    except Singular:
        raise Singular(f"Gram matrix of {Category.parse(x).value}({k}) is singular at n={n}") from None


def is_invertible(x, k: int, n: int) -> bool:
    return determinant(gram(x, k, n)) != 0


def invertibility_threshold(x, k: int, n_max: int = 16) -> int | None:
    """Smallest ``n0`` with the Gram matrix invertible for every ``n0 <= n <= n_max``.

    Found by trying; returns ``None`` if even ``n_max`` is singular.
    """
    if not enumerate_category(Category.parse(x), k):
        return None
    n0 = None
    for n in range(n_max, 0, -1):
        if is_invertible(x, k, n):
            n0 = n
        else:
            break
    return n0


# ---------------------------------------------------------------------------
# Weingarten route
# ---------------------------------------------------------------------------


class ProjectionMatrix:
    """``H`` for ``D(k)`` at dimension ``n``, computed through kernels.

    ``H[i, j] = sum_{pi <= ker i, sigma <= ker j} W(pi, sigma)`` depends only
    on ``(ker i, ker j)``, so the whole matrix is stored as a small table
    indexed by the set partitions of ``[k]`` with at most ``n`` blocks.
    """

    def __init__(self, x, k: int, n: int):
        self.x = Category.parse(x)
        self.k = k
        self.n = n
        self.members = _members(self.x, k)
        self.W = weingarten(self.x, k, n)
        reps = kernel_representatives(k, max_blocks=n)
        self.kernels = [kernel(r) for r in reps]
        self.kernel_index = {p: a for a, p in enumerate(self.kernels)}
        zeta = ExactMatrix([[int(p.leq(kap)) for p in self.members] for kap in self.kernels])
        self.A = zeta
        self.table = zeta @ self.W @ zeta.T
        self._kid = None

    @property
    def size(self) -> int:
        return self.n ** self.k

    def entry(self, i: Sequence[int], j: Sequence[int]) -> Fraction:
        self._check_index(i)
        self._check_index(j)
        return self.table[self.kernel_index[kernel(i)], self.kernel_index[kernel(j)]]

    def _check_index(self, i: Sequence[int]) -> None:
        if len(i) != self.k or any(not 1 <= v <= self.n for v in i):
            raise ValueError(f"multi-index {tuple(i)} not in [{self.n}]^{self.k}")

    def kernel_ids(self) -> np.ndarray:
        """Kernel-table row of every multi-index, in lexicographic order of ``[n]^k``."""
        if self._kid is None:
            ki = self.kernel_index
            self._kid = np.fromiter((ki[kernel(i)] for i in multi_indices(self.n, self.k)),
                                    dtype=np.int64, count=self.size)
        return self._kid

    def scaled_table(self) -> tuple[np.ndarray, int]:
        return scaled_integer_array(self.table.entries)

    def column(self, j: Sequence[int]) -> tuple[np.ndarray, int]:
        """Column ``H e_j`` as ``(integer array, denominator)``."""
        self._check_index(j)
        tab, d = self.scaled_table()
        return tab[self.kernel_ids(), self.kernel_index[kernel(j)]], d

    def column_fractions(self, j: Sequence[int]) -> list[Fraction]:
        col = self.table.column(self.kernel_index[kernel(j)])
        return [col[a] for a in self.kernel_ids()]

    def materialize(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> tuple[np.ndarray, int]:
        """Full ``n^k x n^k`` matrix as ``(integer array, denominator)``."""
        if self.size > cap:
            raise MemoryError(f"n^k = {self.size} exceeds the materialisation cap {cap}")
        tab, d = self.scaled_table()
        kid = self.kernel_ids()
        return tab[np.ix_(kid, kid)], d

    def apply(self, vec: dict) -> dict:
        """``H v`` for a sparse vector ``{multi-index: coefficient}``.

        Computed as ``A (W (A^T v))`` after bucketing ``v`` by kernel.
        """
        bucket = [Fraction(0)] * len(self.kernels)
        for j, c in vec.items():
            self._check_index(j)
            bucket[self.kernel_index[kernel(j)]] += Fraction(c)
        out_by_kernel = self.table @ bucket
        out = {}
        for i, a in zip(multi_indices(self.n, self.k), self.kernel_ids()):
            v = out_by_kernel[a]
            if v:
                out[i] = v
        return out


@lru_cache(maxsize=256)
def projection_matrix(x, k: int, n: int) -> ProjectionMatrix:
    return ProjectionMatrix(Category.parse(x), k, n)


def projection_entry(x, k: int, n: int, i: Sequence[int], j: Sequence[int]) -> Fraction:
    """``H[i, j]`` via the Weingarten double sum."""
    members = _members(x, k)
    W = weingarten(Category.parse(x), k, n)
    ki, kj = kernel(i), kernel(j)
    if len(i) != k or len(j) != k:
        raise ValueError("multi-index length must equal k")
    rows = [a for a, p in enumerate(members) if p.leq(ki)]
    cols = [b for b, q in enumerate(members) if q.leq(kj)]
    return sum((W[a, b] for a in rows for b in cols), Fraction(0))


# ---------------------------------------------------------------------------
# explicit-vector route (oracle)
# ---------------------------------------------------------------------------


def linear_index(j: Sequence[int], n: int) -> int:
    """Position of ``e_j`` in the lexicographic basis of ``[n]^k``."""
    idx = 0
    for v in j:
        idx = idx * n + (v - 1)
    return idx


def partition_vector(pi: SetPartition, n: int) -> np.ndarray:
    """``T_pi`` as a 0/1 integer vector of length ``n**k``.

    Built generatively: every assignment of values to the blocks of ``pi``
    gives one index ``j`` with ``pi <= ker j``.
    """
    v = np.zeros(n ** pi.k, dtype=np.int64)
    for vals in product(range(1, n + 1), repeat=pi.num_blocks):
        j = [0] * pi.k
        for val, block in zip(vals, pi.blocks):
            for pos in block:
                j[pos - 1] = val
        v[linear_index(j, n)] = 1
    return v


class ProjectionOracle:
    """Orthogonal projection onto ``Span{T_pi : pi in D(k)}`` from explicit vectors."""

    def __init__(self, x, k: int, n: int):
        self.x = Category.parse(x)
        self.k, self.n = k, n
        self.members = _members(self.x, k)
        self.T = np.stack([partition_vector(p, n) for p in self.members], axis=1)
        g = exact_int_matmul(self.T.T, self.T)
        self.gram = ExactMatrix([[int(v) for v in row] for row in g])
        if determinant(self.gram) == 0:
            raise Singular(f"T_pi family of {self.x.value}({k}) is dependent at n={n}")
        self._coef: dict[tuple[int, ...], list[Fraction]] = {}

    def coefficients(self, j: Sequence[int]) -> list[Fraction]:
        """``alpha`` with ``H e_j = sum_pi alpha_pi T_pi``."""
        rhs = tuple(int(v) for v in self.T[linear_index(j, self.n)])
        if rhs not in self._coef:
            self._coef[rhs] = solve_linear(self.gram, rhs)
        return self._coef[rhs]

    def entry(self, i: Sequence[int], j: Sequence[int]) -> Fraction:
        alpha = self.coefficients(j)
        row = self.T[linear_index(i, self.n)]
        return sum((a for a, t in zip(alpha, row) if t), Fraction(0))

    def column(self, j: Sequence[int]) -> tuple[np.ndarray, int]:
        alpha = self.coefficients(j)
        a, d = scaled_integer_array([alpha])
        return exact_int_matmul(self.T, a[0].reshape(-1, 1)).ravel(), d


@lru_cache(maxsize=64)
def projection_oracle_for(x, k: int, n: int) -> ProjectionOracle:
    return ProjectionOracle(Category.parse(x), k, n)


def projection_oracle(x, k: int, n: int, i: Sequence[int], j: Sequence[int]) -> Fraction:
    """``<e_i, H e_j>`` from the explicit vectors (independent of the Weingarten sum)."""
    return projection_oracle_for(Category.parse(x), k, n).entry(i, j)


# ---------------------------------------------------------------------------
# fixed space, estimates, lemma checks
# ---------------------------------------------------------------------------


def is_idempotent(x, k: int, n: int, cap: int = DEFAULT_MATERIALIZE_CAP) -> bool:
    """``H @ H == H`` and ``H == H^T`` on the full materialised matrix."""
    H, d = projection_matrix(x, k, n).materialize(cap)
    if not np.array_equal(H, H.T):
        return False
    return np.array_equal(exact_int_matmul(H, H), H * d)


def fixed_space(x, k: int, n: int, cap: int = DEFAULT_MATERIALIZE_CAP) -> list[list[Fraction]]:
    """Basis of the eigenspace of ``H`` at eigenvalue 1.

    ``H`` is checked to be idempotent first; the 1-eigenspace of an
    idempotent is its column space, whose dimension is ``trace(H)``.  For
    small sizes the answer is cross-checked against ``null(H - I)``.
    """
    P = projection_matrix(x, k, n)
    if not is_idempotent(x, k, n, cap):
        raise ArithmeticError("projection is not idempotent")
    H, d = P.materialize(cap)
    rank = Fraction(int(np.trace(H)), d)
    if rank.denominator != 1:
        raise ArithmeticError("trace of an idempotent must be an integer")
    order = [linear_index(r, n) for r in kernel_representatives(k, max_blocks=n)]
    rest = [c for c in range(P.size) if c not in set(order)]

    def cols():
        for c in order + rest:
            yield [Fraction(int(v), d) for v in H[:, c]]

    basis = independent_columns(cols(), limit=int(rank))
    if P.size <= 81:
        M = ExactMatrix([[Fraction(int(v), d) - (r == c) for c, v in enumerate(row)]
                         for r, row in enumerate(H)])
        if len(nullspace_basis(M)) != len(basis):
            raise ArithmeticError("column space and null(H - I) disagree")
    return basis


def in_span(vectors: list[list[Fraction]], target: Sequence) -> bool:
    """Whether ``target`` is a linear combination of ``vectors``."""
    if not vectors:
        return not any(target)
    base = len(independent_columns(vectors))
    return len(independent_columns(list(vectors) + [list(map(Fraction, target))])) == base


def weingarten_estimate_residual(x, k: int, n: int, p1: SetPartition, p2: SetPartition) -> Fraction:
    """``|n^{|p1|} W(p1, p2) - mu_{I(k)}(p1, p2)|``."""
    members = _members(x, k)
    idx = {p: a for a, p in enumerate(members)}
    if p1 not in idx or p2 not in idx:
        raise ValueError("partitions must lie in D(k)")
    W = weingarten(Category.parse(x), k, n)
    mu = interval_poset(k).mobius(p1, p2)
    return abs(n ** p1.num_blocks * W[idx[p1], idx[p2]] - mu)


def row_sum_identity(x, k: int, n: int, pi: SetPartition, r: Sequence[int]) -> bool:
    """``sum_{s : pi <= ker s} H[r, s] == zeta(pi, ker r)``."""
    P = projection_matrix(x, k, n)
    total = sum((P.entry(r, s) for s in multi_indices(n, k) if pi.leq(kernel(s))), Fraction(0))
    return total == int(pi.leq(kernel(r)))


def haar_lemma_check(x, k: int, l: int, n: int, j: Sequence[int]) -> bool:
    """``H^{D(k+l)} (T_{1_k} (x) e_j) == T_{1_k} (x) H^{D(l)} e_j`` as explicit vectors."""
    x = Category.parse(x)
    if not x.allows(k):
        raise ValueError(f"k={k} is not in L_D for {x.value}")
    if len(j) != l:
        raise ValueError("j must have length l")
    big = projection_matrix(x, k + l, n)
    small = projection_matrix(x, l, n)
    vec = {tuple([a] * k) + tuple(j): 1 for a in range(1, n + 1)}
    lhs = big.apply(vec)
    col = small.column_fractions(j)
    rhs = {}
    for a in range(1, n + 1):
        for i, v in zip(multi_indices(n, l), col):
            if v:
                rhs[tuple([a] * k) + i] = v
    return lhs == rhs


def projection_equivalence(x, k: int, n: int, chunk: int = 512) -> bool:
    """Whether the Weingarten route and the explicit-vector route give the same ``H``.

    Two exact comparisons:

    * the kernel table of :class:`ProjectionMatrix` against
      :func:`projection_entry` on every pair of kernel representatives;
    * every entry ``(i, j)`` of ``[n]^k x [n]^k`` of the table route against
      the oracle.  The oracle column ``H e_j`` only depends on the row
      ``(T_pi[j])_pi``, so one solve per distinct row suffices; the
      comparison itself is over all ``n^(2k)`` entries, in integer arithmetic
      after clearing denominators.
    """
    x = Category.parse(x)
    P = projection_matrix(x, k, n)
    reps = kernel_representatives(k, max_blocks=n)
    for a, r in enumerate(reps):
        for b, s in enumerate(reps):
            if P.table[a, b] != projection_entry(x, k, n, r, s):
                return False
    O = projection_oracle_for(x, k, n)
    tab, d_h = P.scaled_table()
    kid = P.kernel_ids()
    patterns, pid = np.unique(O.T, axis=0, return_inverse=True)
    pid = pid.ravel()
    alphas = [solve_linear(O.gram, tuple(int(v) for v in pat)) for pat in patterns]
    A, d_a = scaled_integer_array([list(col) for col in zip(*alphas)])
    if d_h * d_a > 2 ** 40:  # |H[i, j]| <= 1, so this bounds every scaled entry
        tab, A = tab.astype(object), A.astype(object)
    # both sides scaled to the common denominator d_h * d_a, stored column-major
    oracle_cols = np.ascontiguousarray((exact_int_matmul(O.T, A) * d_h).T)
    table_cols = np.ascontiguousarray((tab[kid] * d_a).T)
    for start in range(0, P.size, chunk):
        cols = slice(start, min(P.size, start + chunk))
        if not np.array_equal(oracle_cols[pid[cols]], table_cols[kid[cols]]):
            return False
    return True
