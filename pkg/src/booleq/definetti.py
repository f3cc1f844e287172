"""Conditional expectations on noncommutative polynomials and de Finetti checks.

Everything happens at the level of coefficients.  A polynomial without
constant term is a map from words (tuples of variable labels) to rationals.
The expectation ``E_n = (id (x) h) Psi_n`` acts on a monomial ``X_j`` as

    E_n[X_j] = sum_i H[i, j] X_i,

with ``H`` the projection onto ``Span{T_pi : pi in D(k)}``.

The operator-norm bounds of the analytic theory are replaced by the
coefficient 1-norm ``sum |c_w|``, which dominates ``||ev_x(f)||`` whenever
every ``||x_j|| <= 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

from .cumulants import CumulantSpec, partition_weight
from .exact import fraction_to_str, parse_fraction
from .partitions import (
    Category,
    SetPartition,
    enumerate_category,
    kernel,
    multi_indices,
)
from .posets import interval_poset
from .weingarten import linear_index, projection_matrix


class InconsistentMoments(ValueError):
    """A moment vector is not invariant (not constant on kernel classes / not fixed by H)."""


class NCPoly:
    """Noncommutative polynomial without constant term, ``{word: coefficient}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Sequence[int], Fraction] | Iterable = ()):
        out: dict[tuple[int, ...], Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            w = tuple(int(v) for v in w)
            if not w:
                raise ValueError("constant terms are not allowed")
            if any(v < 1 for v in w):
                raise ValueError("variable labels are positive integers")
            out[w] = out.get(w, Fraction(0)) + Fraction(c)
        self.terms = {w: c for w, c in out.items() if c}

    @classmethod
    def monomial(cls, word: Sequence[int], coef=1) -> "NCPoly":
        return cls({tuple(word): Fraction(coef)})

    def __add__(self, other: "NCPoly") -> "NCPoly":
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, Fraction(0)) + c
        return NCPoly(t)

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def scale(self, c) -> "NCPoly":
        c = Fraction(c)
        return NCPoly({w: v * c for w, v in self.terms.items()})

    __rmul__ = scale

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            t: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    t[w1 + w2] = t.get(w1 + w2, Fraction(0)) + c1 * c2
            return NCPoly(t)
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.terms == other.terms

    def __getitem__(self, word) -> Fraction:
        return self.terms.get(tuple(word), Fraction(0))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def norm1(self) -> Fraction:
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def is_real(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "NCPoly(0)"
        body = " + ".join(f"{c}*" + "".join(f"X{v}" for v in w) for w, c in sorted(self.terms.items()))
        return f"NCPoly({body})"


def partition_polynomial(pi: SetPartition, n: int, lo: int = 1) -> NCPoly:
    """``X_pi = sum_{pi <= ker i, i in [lo, n]^k} X_i``."""
    terms = {}
    rng = range(lo, n + 1)
    for vals in product(rng, repeat=pi.num_blocks):
        w = [0] * pi.k
        for v, b in zip(vals, pi.blocks):
            for p in b:
                w[p - 1] = v
        terms[tuple(w)] = Fraction(1)
    return NCPoly(terms)


# ---------------------------------------------------------------------------
# E_n and its partitioned version
# ---------------------------------------------------------------------------


def conditional_expectation_En(x, n: int, word: Sequence[int]) -> NCPoly:
    """``E_n[X_{j1} ... X_{jk}] = sum_i H[i, j] X_i``."""
    word = tuple(word)
    if any(not 1 <= v <= n for v in word):
        raise ValueError(f"labels of {word} must lie in 1..{n}")
    P = projection_matrix(Category.parse(x), len(word), n)
    col = P.column_fractions(word)
    return NCPoly({i: c for i, c in zip(multi_indices(n, len(word)), col) if c})


def apply_En(x, n: int, f: NCPoly) -> NCPoly:
    """Linear extension of :func:`conditional_expectation_En`."""
    out = NCPoly()
    for w, c in f:
        out = out + conditional_expectation_En(x, n, w).scale(c)
    return out


def partitioned_En(x, n: int, pi: SetPartition) -> NCPoly:
    """``E_n^pi[X_1, ..., X_1] = n^{-|pi|} sum_{pi <= ker i} X_i`` for ``pi`` in ``D(k)``."""
    x = Category.parse(x)
    if not x.contains(pi):
        raise ValueError(f"{pi} is not in {x.value}({pi.k})")
    return partition_polynomial(pi, n).scale(Fraction(1, n ** pi.num_blocks))


def En_cumulant(x, n: int, sigma: SetPartition) -> NCPoly:
    """``K^{E_n}_sigma[X_1, ..., X_1] = sum_{pi in D(k)} E_n^pi mu_{I(k)}(pi, sigma)``."""
    x = Category.parse(x)
    poset = interval_poset(sigma.k)
    out = NCPoly()
    for pi in enumerate_category(x, sigma.k):
        mu = poset.mobius(pi, sigma)
        if mu:
            out = out + partitioned_En(x, n, pi).scale(mu)
    return out


def faraway_polynomial(x, n0: int, n: int, sigma: SetPartition) -> NCPoly:
    """``f^{n0,n}_sigma``: like the cumulant, but indices restricted to ``[n0, n]``."""
    x = Category.parse(x)
    poset = interval_poset(sigma.k)
    out = NCPoly()
    for pi in enumerate_category(x, sigma.k):
        mu = poset.mobius(pi, sigma)
        if mu:
            out = out + partition_polynomial(pi, n, lo=n0).scale(mu * Fraction(1, n ** pi.num_blocks))
    return out


def id_cumulant_residual(x, n: int, j: Sequence[int], n0: int | None = None) -> tuple[Fraction, Fraction | None]:
    """Coefficient 1-norms of

        E_n[X_j] - sum_{sigma in D(k), sigma <= ker j} K^{E_n}_sigma[X_1, ..., X_1]

    and, when ``n0`` is given, of the same difference with ``f^{n0,n}_sigma``
    in place of the cumulants.
    """
    x = Category.parse(x)
    j = tuple(j)
    kj = kernel(j)
    lhs = conditional_expectation_En(x, n, j)
    sigmas = [s for s in enumerate_category(x, len(j)) if s.leq(kj)]
    main = lhs
    for s in sigmas:
        main = main - En_cumulant(x, n, s)
    far = None
    if n0 is not None:
        diff = lhs
        for s in sigmas:
            diff = diff - faraway_polynomial(x, n0, n, s)
        far = diff.norm1()
    return main.norm1(), far


# ---------------------------------------------------------------------------
# moment vectors
# ---------------------------------------------------------------------------


@dataclass
class InvariantMomentVector:
    """``j -> phi(x_{j1} ... x_{jk})`` on all of ``[n]^k`` (lexicographic order)."""

    category: Category
    k: int
    n: int
    values: list[Fraction]

    def __post_init__(self):
        self.category = Category.parse(self.category)
        self.values = [Fraction(v) for v in self.values]
        if len(self.values) != self.n ** self.k:
            raise ValueError(f"expected {self.n ** self.k} values, got {len(self.values)}")

    def __getitem__(self, j: Sequence[int]) -> Fraction:
        return self.values[linear_index(j, self.n)]

    def as_dict(self) -> dict:
        return {j: v for j, v in zip(multi_indices(self.n, self.k), self.values) if v}

    def to_json(self):
        return {"k": self.k, "n": self.n, "values": [fraction_to_str(v) for v in self.values]}


def boolean_iid_moment_vector(spec: CumulantSpec, k: int, n: int) -> InvariantMomentVector:
    """``phi(j) = sum_{pi in I_x(k), pi <= ker j} prod_V kappa_{|V|}``."""
    members = enumerate_category(spec.category, k)

    @lru_cache(maxsize=None)
    def value(kj: SetPartition) -> Fraction:
        return sum((partition_weight(p, spec.kappa) for p in members if p.leq(kj)), Fraction(0))

    vals = [value(kernel(j)) for j in multi_indices(n, k)]
    return InvariantMomentVector(spec.category, k, n, vals)


def invariance_residual_vector(vec: InvariantMomentVector) -> Fraction:
    """``||H phi - phi||_1`` over ``[n]^k``."""
    P = projection_matrix(vec.category, vec.k, vec.n)
    Hphi = P.apply(vec.as_dict())
    total = Fraction(0)
    for j, v in zip(multi_indices(vec.n, vec.k), vec.values):
        total += abs(Hphi.get(j, Fraction(0)) - v)
    return total


def forward_invariance_check(x, spec: CumulantSpec, k: int, n: int) -> Fraction:
    """``||H phi - phi||_1`` for the Boolean i.i.d. moment vector of ``spec``; 0 when invariant."""
    x = Category.parse(x)
    if spec.category is not x:
        spec = CumulantSpec(x, spec.kappa)
    if not enumerate_category(x, k):
        # D(k) empty: H = 0 and the moment vector must vanish
        vec = boolean_iid_moment_vector(spec, k, n)
        return sum((abs(v) for v in vec.values), Fraction(0))
    return invariance_residual_vector(boolean_iid_moment_vector(spec, k, n))


@dataclass
class Recovery:
    spec: CumulantSpec
    product_form_mismatches: list = field(default_factory=list)
    cross_n_conflicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.product_form_mismatches and not self.cross_n_conflicts

    def to_json(self):
        out = self.spec.to_json()
        out["product_form_mismatches"] = [
            {"k": k, "n": n, "index": list(j), "value": fraction_to_str(v), "expected": fraction_to_str(e)}
            for k, n, j, v, e in self.product_form_mismatches]
        out["cross_n_conflicts"] = [{"k": k, "values": [fraction_to_str(v) for v in vs]}
                                    for k, vs in self.cross_n_conflicts]
        return out


def _downset_signature(x: Category, j: Sequence[int]) -> frozenset:
    kj = kernel(j)
    return frozenset(p for p in enumerate_category(x, len(j)) if p.leq(kj))


def recover_cumulants(vectors: Iterable[InvariantMomentVector], x, K: int | None = None) -> Recovery:
    """Recover ``kappa_1 .. kappa_K`` from invariant moment vectors.

    Each vector is first checked to be invariant: constant on the classes of
    multi-indices with the same down-set in ``D(k)`` (zero where the down-set
    is empty) and fixed by ``H``.  Failing vectors raise
    :class:`InconsistentMoments`.  The cumulants then come from the diagonal
    value ``phi(1, ..., 1)`` by the triangular relation
    ``phi(1^k) = sum_{pi in D(k)} prod_V kappa_{|V|}``.
    """
    x = Category.parse(x)
    by_k: dict[int, list[InvariantMomentVector]] = {}
    for v in vectors:
        if v.category is not x:
            raise ValueError(f"vector for {v.category.value} given to recovery for {x.value}")
        _check_invariant(v)
        by_k.setdefault(v.k, []).append(v)
    if K is None:
        K = max(by_k) if by_k else 0
    missing = [k for k in range(1, K + 1) if k not in by_k]
    if missing:
        raise ValueError(f"no moment vector for orders {missing}")
    kappa: dict[int, Fraction] = {}
    conflicts = []
    for k in range(1, K + 1):
        diag = [v[(1,) * k] for v in by_k[k]]
        if len(set(diag)) > 1:
            conflicts.append((k, diag))
        rest = sum((partition_weight(p, kappa) for p in enumerate_category(x, k)
                    if p.num_blocks > 1), Fraction(0))
        value = diag[0] - rest
        if x.allows(k):
            kappa[k] = value
        elif value != 0:
            raise InconsistentMoments(f"order {k} is outside L_{x.value} but phi(1^{k}) needs kappa_{k} = {value}")
    spec = CumulantSpec(x, kappa)
    mismatches = []
    for k, vs in by_k.items():
        if k > K:
            continue
        for v in vs:
            expected = boolean_iid_moment_vector(spec, k, v.n)
            for j, a, b in zip(multi_indices(v.n, k), v.values, expected.values):
                if a != b:
                    mismatches.append((k, v.n, j, a, b))
    return Recovery(spec, mismatches, conflicts)


def _check_invariant(v: InvariantMomentVector) -> None:
    x = v.category
    classes: dict[frozenset, Fraction] = {}
    for j, val in zip(multi_indices(v.n, v.k), v.values):
        sig = _downset_signature(x, j)
        if not sig and val != 0:
            raise InconsistentMoments(f"phi{j} = {val} but no element of {x.value}({v.k}) lies below ker j")
        if sig in classes and classes[sig] != val:
            raise InconsistentMoments(f"phi is not constant on the kernel class of {j} (k={v.k}, n={v.n})")
        classes.setdefault(sig, val)
    if enumerate_category(x, v.k):
        res = invariance_residual_vector(v)
        if res:
            raise InconsistentMoments(f"||H phi - phi||_1 = {res} at k={v.k}, n={v.n}")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def moment_vectors_to_json(x, vectors: Iterable[InvariantMomentVector]) -> dict:
    return {"category": Category.parse(x).value, "vectors": [v.to_json() for v in vectors]}


def moment_vectors_from_json(obj) -> tuple[Category, list[InvariantMomentVector]]:
    if isinstance(obj, str):
        obj = json.loads(obj)
    x = Category.parse(obj["category"])
    vecs = [InvariantMomentVector(x, int(v["k"]), int(v["n"]), [parse_fraction(s) for s in v["values"]])
            for v in obj["vectors"]]
    return x, vecs

