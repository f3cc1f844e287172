"""The acceptance checks, one function per criterion.

Each ``criterion_N`` runs its exact checks and returns a
:class:`CriterionResult`.  The default grids are the full acceptance grids;
``max_k`` and ``max_n`` shrink them (the CLI uses this for quick runs).
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .cumulants import (
    BernoulliParams,
    CumulantSpec,
    bernoulli_moment_closed,
    corner_insertion_vanishing,
    cumulants_from_moments,
    moments_from_cumulants,
)
from .definetti import (
    InconsistentMoments,
    InvariantMomentVector,
    boolean_iid_moment_vector,
    forward_invariance_check,
    id_cumulant_residual,
    recover_cumulants,
)
from .haar import (
    CLOSED_FORMS,
    GeneratorWord,
    haar_value,
    invariance_residual,
    invariance_residual_table,
    random_word,
)
from .partitions import (
    Category,
    SetPartition,
    check_block_stable,
    check_enough_partitions,
    check_interval_closed,
    check_join_stable,
    enumerate_category,
    enumerate_interval,
    kernel_representatives,
    multi_indices,
)
from .posets import category_poset, interval_poset
from .representations import (
    chain_state_value,
    kernel_class_relations,
    liu_and_sum_checks,
    omega_value,
    representation_state,
    semigroup_relation_report,
)
from .weingarten import (
    fixed_space,
    in_span,
    invertibility_threshold,
    partition_vector,
    projection_equivalence,
    projection_matrix,
    weingarten_estimate_residual,
)

ALL = (Category.S, Category.O, Category.H, Category.B)
REPRESENTED = (Category.S, Category.O, Category.H)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool = True
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def record(self, ok: bool, what: str) -> bool:
        self.checks += 1
        if not ok:
            self.passed = False
            self.failures.append(what)
        return ok

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"[{status}] {self.number:2d}. {self.name} ({self.checks} checks, {self.seconds:.1f}s){extra}"

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "passed": self.passed,
                "checks": self.checks, "failures": self.failures[:20], "notes": self.notes}


def _cap(value: int, cap: int | None) -> int:
    return value if cap is None else min(value, cap)


def _k_range(x: Category, max_k: int | None) -> list[int]:
    """``k <= 4``, extended to even ``k <= 6`` for ``o`` and ``h``; empty ``D(k)`` skipped."""
    top = 6 if x in (Category.O, Category.H) else 4
    ks = [k for k in range(1, top + 1) if k <= 4 or k % 2 == 0]
    return [k for k in ks if k <= _cap(top, max_k) and enumerate_category(x, k)]


def _n_range(x: Category, k: int, top: int, max_n: int | None) -> range:
    n0 = invertibility_threshold(x, k)
    return range(n0, _cap(top, max_n) + 1)


def _timed(fn: Callable[..., CriterionResult]) -> Callable[..., CriterionResult]:
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------------------


@_timed
def criterion_1(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """Weingarten projection entries equal the explicit-vector oracle on every ``(i, j)``."""
    res = CriterionResult(1, "projection equivalence")
    for x in ALL:
        for k in _k_range(x, max_k):
            for n in _n_range(x, k, 6, max_n):
                res.record(projection_equivalence(x, k, n), f"{x.value} k={k} n={n}")
    return res


@_timed
def criterion_2(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """Closed Haar forms for ``s``, ``o``, ``h`` equal the projection entries.

    Both sides depend only on ``(ker i, ker j)`` by construction, so the
    comparison runs over all pairs of kernel representatives, which covers
    every ``(i, j)``.  On cells with ``n^k <= 81`` it is repeated entry by
    entry on the full index set.
    """
    res = CriterionResult(2, "Haar closed forms vs Weingarten")
    for x in REPRESENTED:
        closed = CLOSED_FORMS[x]
        for k in _k_range(x, max_k):
            for n in _n_range(x, k, 6, max_n):
                P = projection_matrix(x, k, n)
                reps = kernel_representatives(k, max_blocks=n)
                ok = all(closed(r, s, n) == P.table[a, b]
                         for a, r in enumerate(reps) for b, s in enumerate(reps))
                res.record(ok, f"{x.value} k={k} n={n} kernel table")
                if n ** k <= 81:
                    idx = list(multi_indices(n, k))
                    ok = all(closed(i, j, n) == P.entry(i, j) for i in idx for j in idx)
                    res.record(ok, f"{x.value} k={k} n={n} all entries")
    return res


@_timed
def criterion_3(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """Representations reproduce the Haar functionals and satisfy the relations."""
    res = CriterionResult(3, "representation consistency")
    k_top = _cap(4, max_k)
    # chain formula for s, every (i, j)
    for k in range(1, k_top + 1):
        for n in range(1, _cap(5, max_n) + 1):
            closed = CLOSED_FORMS[Category.S]
            idx = list(multi_indices(n, k))
            ok = all(chain_state_value(GeneratorWord.single(n, i, j)) == closed(i, j, n)
                     for i in idx for j in idx)
            res.record(ok, f"chain s k={k} n={n}")
    # omega for o and h, every (i, j)
    for x in (Category.O, Category.H):
        closed = CLOSED_FORMS[x]
        for k in range(1, k_top + 1):
            for n in range(1, _cap(3, max_n) + 1):
                idx = list(multi_indices(n, k))
                ok = all(omega_value(x, i, j, n) == closed(i, j, n) for i in idx for j in idx)
                res.record(ok, f"omega {x.value} k={k} n={n}")
    # generator relations and their kernel-class form
    for x in REPRESENTED:
        for k in range(1, k_top + 1):
            if not x.allows(k):
                continue
            for n in range(1, _cap(4, max_n) + 1):
                for name, ok in semigroup_relation_report(x, n, k).items():
                    res.record(ok, f"{x.value} k={k} n={n} {name}")
        for k in range(1, k_top + 1):
            if x is not Category.S and k % 2:
                continue
            for n in range(1, _cap(3, max_n) + 1):
                for name, ok in kernel_class_relations(x, n, k).items():
                    res.record(ok, f"{x.value} k={k} n={n} kernel class {name}")
    for n in range(2, _cap(5, max_n) + 1):
        for name, ok in liu_and_sum_checks(n).items():
            res.record(ok, f"{name} n={n}")
    return res


@_timed
def criterion_4(max_k: int | None = None, max_n: int | None = None,
                words: int = 200, seed: int = 2024) -> CriterionResult:
    """Invariance of the Haar functionals and multiplicativity over ``p``."""
    res = CriterionResult(4, "Haar invariance and multiplicativity")
    for x in ALL:
        for k in _k_range(x, max_k):
            for n in _n_range(x, k, 6, max_n):
                res.record(invariance_residual_table(x, k, n) == 0,
                           f"{x.value} k={k} n={n} residual table")
                if n ** k <= 16:
                    idx = list(multi_indices(n, k))
                    ok = all(invariance_residual(x, i, j, n) == 0 for i in idx for j in idx)
                    res.record(ok, f"{x.value} k={k} n={n} direct residual")
    rng = random.Random(seed)
    n_top = max(2, _cap(3, max_n))
    for t in range(words):
        n = rng.randint(2, n_top)
        w1 = random_word(rng, n, max_segments=2, max_len=3)
        w2 = random_word(rng, n, max_segments=2, max_len=3)
        w = w1 * w2
        for x in REPRESENTED:
            lhs = representation_state(x, w)
            ok = lhs == representation_state(x, w1) * representation_state(x, w2) == haar_value(x, w)
            res.record(ok, f"word {t} {x.value} {w}")
        ok = haar_value(Category.B, w) == haar_value(Category.B, w1) * haar_value(Category.B, w2)
        res.record(ok, f"word {t} b {w}")
    res.notes.append("b has no representation here; its multiplicativity is checked on the Weingarten values")
    return res


@_timed
def criterion_5(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """Decay of ``|n^{|pi|} W(pi, sigma) - mu(pi, sigma)|`` for ``s``."""
    res = CriterionResult(5, "Weingarten estimate")
    for k in range(1, _cap(4, max_k) + 1):
        members = enumerate_category(Category.S, k)
        for p1 in members:
            for p2 in members:
                r = {n: weingarten_estimate_residual(Category.S, k, n, p1, p2) for n in (8, 16, 32)}
                for n in (8, 16):
                    res.record(r[2 * n] <= Fraction(3, 5) * r[n],
                               f"k={k} {p1},{p2}: residual({2 * n})={r[2 * n]} vs residual({n})={r[n]}")
    members = enumerate_category(Category.S, 2)
    for n in range(2, 33):
        for p1 in members:
            for p2 in members:
                r = weingarten_estimate_residual(Category.S, 2, n, p1, p2)
                res.record(r == Fraction(1, n - 1), f"k=2 n={n} {p1},{p2}: {r}")
    return res


@_timed
def criterion_6(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """Möbius function: both defining sums, restriction to categories, closed form."""
    res = CriterionResult(6, "Möbius function")
    for k in range(1, _cap(7, max_k) + 1):
        poset = interval_poset(k)
        els = poset.elements
        for a in els:
            for b in els:
                if not a.leq(b):
                    continue
                between = poset.interval(a, b)
                delta = int(a == b)
                left = sum((poset.mobius(a, r) for r in between), Fraction(0))
                right = sum((poset.mobius(r, b) for r in between), Fraction(0))
                res.record(left == delta and right == delta, f"k={k} sums on [{a},{b}]")
                res.record(poset.mobius(a, b) == (-1) ** (a.num_blocks - b.num_blocks),
                           f"k={k} closed form on [{a},{b}]")
        for x in ALL:
            if not enumerate_category(x, k) or not check_interval_closed(x, k):
                continue
            sub = category_poset(x, k)
            ok = all(sub.mobius(a, b) == poset.mobius(a, b)
                     for a in sub.elements for b in sub.elements if a.leq(b))
            res.record(ok, f"k={k} mu_{x.value} = mu_I")
    return res


@_timed
def criterion_7(max_k: int | None = None, max_n: int | None = None,
                seed: int = 7, corners: int = 100) -> CriterionResult:
    """Moment-cumulant algebra, Bernoulli moments and corner vanishing."""
    res = CriterionResult(7, "cumulant algebra")
    rng = random.Random(seed)
    K = _cap(8, max_k and max(max_k, 2))
    for x in ALL:
        for t in range(10):
            kappa = {m: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for m in x.L(K)}
            spec = CumulantSpec(x, kappa)
            moms = [moments_from_cumulants(spec, m) for m in range(1, K + 1)]
            back = cumulants_from_moments(moms, x)
            ok = back.ok and all(back.kappa[m] == spec[m] for m in range(1, K + 1))
            res.record(ok, f"round trip {x.value} #{t}")
    # Bernoulli: random rational atoms alpha > 0 > -beta, plus irrational roots
    params = []
    for _ in range(10):
        alpha = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        beta = Fraction(rng.randint(1, 9), rng.randint(1, 4))
        params.append(BernoulliParams(alpha - beta, alpha * beta))
    params += [BernoulliParams(1, 1), BernoulliParams(0, 2), BernoulliParams(Fraction(1, 3), 5)]
    for p in params:
        for m in range(1, 11):
            c = bernoulli_moment_closed(p, m)
            ok = c.is_rational and c.to_fraction() == moments_from_cumulants(p.spec(), m)
            res.record(ok, f"Bernoulli mu={p.mu} var={p.var} m={m}")
    ber = BernoulliParams(1, 2)
    for m in range(1, 11):
        expected = Fraction(2 ** (m + 1) - (-1) ** (m + 1), 3)
        res.record(moments_from_cumulants(ber.spec(), m) == expected, f"Ber(1,2) m={m}")
    for s in range(corners):
        dim = 2 + s % 3
        res.record(corner_insertion_vanishing(dim, seed=s), f"corner seed={s} dim={dim}")
    return res


@_timed
def criterion_8(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """The 1-eigenspace of ``H`` is ``Span{T_pi}`` of dimension ``|D(k)|``."""
    res = CriterionResult(8, "fixed space")
    for x in ALL:
        for k in range(1, _cap(4, max_k) + 1):
            members = enumerate_category(x, k)
            if not members:
                continue
            for n in _n_range(x, k, 5, max_n):
                basis = fixed_space(x, k, n)
                ok = len(basis) == len(members) and all(
                    in_span(basis, [int(v) for v in partition_vector(p, n)]) for p in members)
                res.record(ok, f"{x.value} k={k} n={n}: dim {len(basis)} vs {len(members)}")
    res.notes.append("D(k) empty (odd k for o and h) has no projection to test")
    return res


# ---------------------------------------------------------------------------
# de Finetti


def _random_specs(x: Category, count: int, seed: int) -> list[CumulantSpec]:
    rng = random.Random(f"{seed}-{x.value}")
    out = []
    for _ in range(count):
        kappa = {m: Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for m in x.L(5)}
        out.append(CumulantSpec(x, kappa))
    return out


def _named_specs() -> list[CumulantSpec]:
    """Centred Bernoulli for ``o``, an even law for ``h``, a shifted Bernoulli for ``b``."""
    return [
        CumulantSpec(Category.O, {2: Fraction(3, 2)}),
        CumulantSpec(Category.H, {2: 1, 4: Fraction(-1, 3)}),
        BernoulliParams(1, 2).spec(),
        CumulantSpec(Category.S, {1: 1, 2: 2}),
    ]


def _specs(x: Category, count: int, seed: int) -> list[CumulantSpec]:
    return _random_specs(x, count, seed) + [s for s in _named_specs() if s.category is x]


def _spec_key(spec: CumulantSpec) -> tuple:
    return spec.category, tuple(sorted(spec.kappa.items()))


@lru_cache(maxsize=None)
def _moment_vector(key: tuple, k: int, n: int) -> InvariantMomentVector:
    x, kappa = key
    return boolean_iid_moment_vector(CumulantSpec(x, dict(kappa)), k, n)


def _definetti_cells(x: Category, max_k: int | None, max_n: int | None) -> list[tuple[int, int]]:
    cells = []
    for k in range(1, _cap(5, max_k) + 1):
        if enumerate_category(x, k):
            cells += [(k, n) for n in _n_range(x, k, 6, max_n)]
        else:
            cells += [(k, n) for n in range(1, _cap(6, max_n) + 1)]
    return cells


@_timed
def criterion_9(max_k: int | None = None, max_n: int | None = None,
                specs: int = 20, seed: int = 9) -> CriterionResult:
    """Boolean i.i.d. moment vectors are fixed by ``H``."""
    res = CriterionResult(9, "de Finetti forward direction")
    for x in ALL:
        for t, spec in enumerate(_specs(x, specs, seed)):
            for k, n in _definetti_cells(x, max_k, max_n):
                r = forward_invariance_check(x, spec, k, n)
                res.record(r == 0, f"{x.value} spec #{t} k={k} n={n}: residual {r}")
    return res


def _perturb(vec: InvariantMomentVector) -> InvariantMomentVector:
    """Change one entry off the diagonal ``(1, ..., 1)``."""
    vals = list(vec.values)
    vals[-1] += 1
    return InvariantMomentVector(vec.category, vec.k, vec.n, vals)


@_timed
def criterion_10(max_k: int | None = None, max_n: int | None = None,
                 specs: int = 20, seed: int = 9) -> CriterionResult:
    """The exact ``2/n`` residual, cumulant recovery and rejection of non-invariant input."""
    res = CriterionResult(10, "de Finetti converse ingredients")
    for n in range(2, _cap(12, max_n and max(max_n, 2)) + 1):
        main, _ = id_cumulant_residual(Category.S, n, (1, 2))
        res.record(main == Fraction(2, n), f"s j=(1,2) n={n}: residual {main}")
    for x in ALL:
        cells = _definetti_cells(x, max_k, max_n)
        for t, spec in enumerate(_specs(x, specs, seed)):
            vecs = [_moment_vector(_spec_key(spec), k, n) for k, n in cells]
            rec = recover_cumulants(vecs, x)
            ok = rec.ok and rec.spec.kappa == {m: v for m, v in spec.kappa.items()
                                                if m <= max(k for k, _ in cells)}
            res.record(ok, f"{x.value} spec #{t} recovery")
        spec = _specs(x, 1, seed)[0]
        k, n = max((c for c in cells if enumerate_category(x, c[0])), key=lambda c: (c[0], c[1]))
        broken = _perturb(_moment_vector(_spec_key(spec), k, n))
        try:
            recover_cumulants([broken], x, K=k)
            rejected = False
        except InconsistentMoments:
            rejected = True
        res.record(rejected, f"{x.value} perturbed vector k={k} n={n} accepted")
    return res


@_timed
def criterion_11(max_k: int | None = None, max_n: int | None = None) -> CriterionResult:
    """Counts of interval partitions, the blockwise conditions and join stability."""
    res = CriterionResult(11, "category combinatorics")
    for k in range(1, _cap(12, max_k and max(max_k, 3)) + 1):
        res.record(len(enumerate_interval(k)) == 2 ** (k - 1), f"|I({k})|")
    kmax = _cap(8, max_k and max(max_k, 3))
    for x in ALL:
        for k in range(1, kmax + 1):
            res.record(check_block_stable(x, k), f"{x.value} block-stable k={k}")
            res.record(check_interval_closed(x, k), f"{x.value} interval-closed k={k}")
            if x is not Category.B:
                res.record(not check_join_stable(x, k), f"{x.value} join-stable k={k}")
        res.record(check_enough_partitions(x, kmax), f"{x.value} enough partitions")
    a = SetPartition([[1, 2], [3]])
    b = SetPartition([[1], [2, 3]])
    joined = a.join(b)
    ok = (joined == SetPartition.one_block(3) and not Category.B.contains(joined)
          and (a, b) in check_join_stable(Category.B, 3))
    res.record(ok, "b join counterexample {12}{3} v {1}{23}")
    return res


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def run_all(max_k: int | None = None, max_n: int | None = None,
            only: list[int] | None = None) -> list[CriterionResult]:
    chosen = CRITERIA if not only else [CRITERIA[i - 1] for i in only]
    return [c(max_k=max_k, max_n=max_n) for c in chosen]
