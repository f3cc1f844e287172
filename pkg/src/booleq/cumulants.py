"""Boolean cumulants over interval partitions.

Two kinds of moment functionals are supported:

* scalar functionals on words in variables ``x_1, x_2, ...`` (a word is a tuple
  of variable labels, multiplication is concatenation);
* corner expectations ``E(y) = e y e`` on exact square matrices, the finite
  model of an operator-valued conditional expectation.

Cumulants are defined through the Moebius function of ``I(k)``:
``K_pi = sum_{sigma <= pi} E^sigma mu(sigma, pi)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Callable, Mapping, Sequence

from .exact import (
    ExactMatrix,
    QuadScalar,
    Singular,
    fraction_to_str,
    invert_matrix,
    is_perfect_square,
)
from .partitions import (
    Category,
    SetPartition,
    enumerate_category,
    enumerate_interval,
    inf_category,
    kernel,
)
from .posets import interval_poset


class SizeMismatch(ValueError):
    """The partition and the argument list have different sizes."""


class SupportViolation(ValueError):
    """A cumulant is nonzero at an order outside ``L_D``."""


# ---------------------------------------------------------------------------
# moment functionals
# ---------------------------------------------------------------------------


@dataclass
class MomentFunctional:
    """``E`` applied to ordered products of algebra elements.

    ``expect(ys)`` returns ``E[y_1 ... y_m]``; ``multiply`` combines values
    coming from different blocks (scalar product or matrix product).
    """

    expect: Callable[[Sequence], object]
    multiply: Callable[[object, object], object]
    one: object = Fraction(1)
    zero: object = Fraction(0)


def scalar_functional(word_moment: Callable[[tuple], Fraction]) -> MomentFunctional:
    """Scalar functional on words; arguments are words, their product is concatenation."""

    def expect(ys):
        word = tuple(v for y in ys for v in y)
        return Fraction(word_moment(word))

    return MomentFunctional(expect, lambda a, b: a * b)


def single_variable_functional(moments: Mapping[int, Fraction]) -> MomentFunctional:
    """One variable ``x`` with ``E[x^m] = moments[m]``."""
    return scalar_functional(lambda w: moments[len(w)])


def boolean_iid_functional(moments: Mapping[int, Fraction]) -> MomentFunctional:
    """Boolean i.i.d. variables with common moments.

    ``E[x_{j1} ... x_{jk}]`` is the product, over the blocks of
    ``inf_I ker j`` (maximal runs of equal consecutive labels), of the moment
    of the corresponding order.
    """

    def word_moment(word):
        runs = inf_category(Category.S, kernel(word))
        return reduce(lambda acc, b: acc * Fraction(moments[len(b)]), runs.blocks, Fraction(1))

    return scalar_functional(word_moment)


def corner_functional(e: ExactMatrix) -> MomentFunctional:
    """``E(y) = e y e`` on matrices; products inside and across blocks are matrix products."""
    dim = e.rows

    def expect(ys):
        prod = reduce(lambda a, b: a @ b, ys)
        return e @ prod @ e

    return MomentFunctional(expect, lambda a, b: a @ b,
                            one=ExactMatrix.identity(dim), zero=ExactMatrix.zeros(dim, dim))


def _check_size(pi: SetPartition, ys: Sequence) -> None:
    if pi.k != len(ys):
        raise SizeMismatch(f"partition of [{pi.k}] with {len(ys)} arguments")
    if not pi.is_interval:
        raise ValueError(f"{pi} is not an interval partition")


def partitioned_expectation(E: MomentFunctional, pi: SetPartition, ys: Sequence):
    """Ordered product over the blocks of ``pi`` of ``E[prod_{j in V} y_j]``."""
    _check_size(pi, ys)
    vals = [E.expect([ys[p - 1] for p in block]) for block in pi.blocks]
    return reduce(E.multiply, vals)


def cumulant(E: MomentFunctional, pi: SetPartition, ys: Sequence, check_multiplicative: bool = False):
    """Boolean cumulant ``K_pi[y_1, ..., y_k]`` via the Moebius function of ``I(k)``."""
    _check_size(pi, ys)
    poset = interval_poset(pi.k)
    total = None
    for sigma in poset.below(pi):
        mu = poset.mobius(sigma, pi)
        if mu == 0:
            continue
        term = partitioned_expectation(E, sigma, ys) * mu
        total = term if total is None else total + term
    if total is None:
        total = E.zero
    if check_multiplicative and pi.num_blocks > 1:
        parts = [cumulant(E, SetPartition.one_block(len(b)), [ys[p - 1] for p in b]) for b in pi.blocks]
        if reduce(E.multiply, parts) != total:
            raise ArithmeticError(f"cumulant of {pi} is not multiplicative over blocks")
    return total


# ---------------------------------------------------------------------------
# cumulant specs and the moment-cumulant transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CumulantSpec:
    """Cumulants ``kappa_m`` of a single variable, supported in ``L_D``."""

    category: Category
    kappa: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        x = Category.parse(self.category)
        object.__setattr__(self, "category", x)
        kap = {int(m): Fraction(v) for m, v in dict(self.kappa).items() if Fraction(v) != 0}
        bad = sorted(m for m in kap if not x.allows(m))
        if bad:
            raise SupportViolation(f"kappa_{bad} nonzero outside L_{x.value}")
        object.__setattr__(self, "kappa", kap)

    def __getitem__(self, m: int) -> Fraction:
        return self.kappa.get(m, Fraction(0))

    def to_json(self):
        return {"category": self.category.value,
                "kappa": {str(m): fraction_to_str(v) for m, v in sorted(self.kappa.items())}}


def partition_weight(pi: SetPartition, kappa: Mapping[int, Fraction]) -> Fraction:
    """``prod_{V in pi} kappa_{|V|}``."""
    out = Fraction(1)
    for b in pi.blocks:
        out *= Fraction(kappa.get(len(b), 0))
        if not out:
            break
    return out


def moments_from_cumulants(spec: CumulantSpec, k: int) -> Fraction:
    """``sum_{pi in I_x(k)} prod_V kappa_{|V|}``."""
    return sum((partition_weight(p, spec.kappa) for p in enumerate_category(spec.category, k)),
               Fraction(0))


@dataclass
class CumulantRecovery:
    category: Category
    kappa: dict[int, Fraction]
    violations: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def spec(self) -> CumulantSpec:
        if self.violations:
            raise SupportViolation(f"kappa_{self.violations} nonzero outside L_{self.category.value}")
        return CumulantSpec(self.category, self.kappa)

    def to_json(self):
        return {"category": self.category.value,
                "kappa": {str(m): fraction_to_str(v) for m, v in sorted(self.kappa.items())},
                "violations": self.violations}


def cumulants_from_moments(moments: Mapping[int, Fraction] | Sequence, x) -> CumulantRecovery:
    """Invert the moment-cumulant relation and report the support violations.

    ``moments`` is either a mapping ``m -> E[x^m]`` for ``m = 1..K`` or the
    sequence ``(E[x], E[x^2], ...)``.
    """
    x = Category.parse(x)
    if not isinstance(moments, Mapping):
        moments = {m: v for m, v in enumerate(moments, start=1)}
    mom = {int(m): Fraction(v) for m, v in moments.items()}
    K = max(mom) if mom else 0
    if sorted(mom) != list(range(1, K + 1)):
        raise ValueError("moments must be given for orders 1..K")
    kappa: dict[int, Fraction] = {}
    for k in range(1, K + 1):
        poset = interval_poset(k)
        top = SetPartition.one_block(k)
        kappa[k] = sum((partition_weight(s, mom) * poset.mobius(s, top) for s in poset.elements),
                       Fraction(0))
    violations = [m for m, v in kappa.items() if v != 0 and not x.allows(m)]
    return CumulantRecovery(x, kappa, violations)


# ---------------------------------------------------------------------------
# Bernoulli laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BernoulliParams:
    """Shifted Bernoulli law with mean ``mu`` and variance ``var``.

    Its atoms are the roots ``alpha`` and ``-beta`` of ``Z^2 - mu Z - var``.
    """

    mu: Fraction
    var: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        object.__setattr__(self, "var", Fraction(self.var))
        if self.var <= 0:
            raise ValueError("variance must be positive")

    @property
    def discriminant(self) -> Fraction:
        return self.mu * self.mu + 4 * self.var

    @property
    def rational_roots(self) -> bool:
        d = self.discriminant
        return is_perfect_square(d.numerator) and is_perfect_square(d.denominator)

    @property
    def roots(self) -> tuple[QuadScalar, QuadScalar]:
        """``(alpha, beta)`` with ``alpha - beta = mu`` and ``alpha beta = var``."""
        r = QuadScalar.sqrt(self.discriminant)
        half = Fraction(1, 2)
        return (r + self.mu) * half, (r - self.mu) * half

    def spec(self) -> CumulantSpec:
        return CumulantSpec(Category.B, {1: self.mu, 2: self.var})


def bernoulli_moment_closed(params: BernoulliParams, m: int) -> QuadScalar:
    """``(alpha^(m+1) - (-beta)^(m+1)) / (alpha + beta)`` in exact quadratic arithmetic."""
    a, b = params.roots
    return (a ** (m + 1) - (-b) ** (m + 1)) / (a + b)


def bernoulli_moment(params: BernoulliParams, m: int) -> Fraction:
    """``E[x^m]`` for the shifted Bernoulli law.

    Uses the closed form when the roots are rational; otherwise the linear
    recurrence ``u_{r+2} = mu u_{r+1} + var u_r`` (``u_0 = 0``, ``u_1 = 1``,
    ``E[x^m] = u_{m+1}``), which stays rational.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if params.rational_roots:
        return bernoulli_moment_closed(params, m).to_fraction()
    u0, u1 = Fraction(0), Fraction(1)
    for _ in range(m):
        u0, u1 = u1, params.mu * u1 + params.var * u0
    return u1


# ---------------------------------------------------------------------------
# independence checks
# ---------------------------------------------------------------------------


@dataclass
class MixedCumulantReport:
    checked: int
    failures: list
    kappa: dict[int, Fraction]

    @property
    def ok(self) -> bool:
        return not self.failures


def mixed_cumulant_check(E: MomentFunctional, labels: Sequence[int], k: int,
                         n_samples: int = 50, seed: int = 0,
                         exhaustive: bool = False) -> MixedCumulantReport:
    """Check ``E[x_j] = sum_{pi in I(k), pi <= ker j} K_pi[x, ..., x]`` exactly.

    ``K_pi[x, ..., x]`` is built from the single-variable cumulants of
    ``x = x_{labels[0]}``.  Index tuples are sampled with a seeded RNG, or all
    of them are checked when ``exhaustive`` is set.
    """
    x0 = (labels[0],)
    kappa = {m: cumulant(E, SetPartition.one_block(m), [x0] * m) for m in range(1, k + 1)}
    if exhaustive:
        samples = list(product(labels, repeat=k))
    else:
        rng = random.Random(seed)
        samples = [tuple(rng.choice(labels) for _ in range(k)) for _ in range(n_samples)]
    failures = []
    for j in samples:
        lhs = E.expect([(v,) for v in j])
        kj = kernel(j)
        rhs = sum((partition_weight(p, kappa) for p in enumerate_interval(k) if p.leq(kj)),
                  Fraction(0))
        if lhs != rhs:
            failures.append((j, lhs, rhs))
    return MixedCumulantReport(len(samples), failures, kappa)


def _random_rational_matrix(rng: random.Random, rows: int, cols: int, lo: int = -4, hi: int = 4) -> ExactMatrix:
    return ExactMatrix([[Fraction(rng.randint(lo, hi), rng.randint(1, 3)) for _ in range(cols)]
                        for _ in range(rows)])


def random_projection(rng: random.Random, dim: int) -> ExactMatrix:
    """Orthogonal projection ``A (A^T A)^{-1} A^T`` onto a random rational subspace."""
    while True:
        r = rng.randint(1, dim - 1)
        A = ExactMatrix([[rng.randint(-3, 3) for _ in range(r)] for _ in range(dim)])
        try:
            return A @ invert_matrix(A.T @ A) @ A.T
        except Singular:
            continue


def corner_insertion_vanishing(dim: int, seed: int, k: int | None = None,
                               pi: SetPartition | None = None, l: int | None = None) -> bool:
    """``K_pi[y_1, ..., y_l b, y_{l+1}, ..., y_k] == 0`` when ``l`` and ``l+1`` share a block.

    ``E(y) = e y e`` for a random rational projection ``e`` and ``b = e b' e``.
    Anything not given (``k <= 4``, ``pi``, ``l``) is drawn from the seed.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = random.Random(seed)
    e = random_projection(rng, dim)
    if e @ e != e or e.T != e:
        raise ArithmeticError("random projection is not an orthogonal projection")
    if k is None:
        k = pi.k if pi is not None else rng.randint(2, 4)
    if pi is None:
        candidates = [p for p in enumerate_interval(k) if p.num_blocks < k]
        pi = rng.choice(candidates)
    if l is None:
        links = [r for r in range(1, k) if pi.labels[r - 1] == pi.labels[r]]
        l = rng.choice(links)
    if pi.labels[l - 1] != pi.labels[l]:
        raise ValueError(f"{l} and {l + 1} are not in the same block of {pi}")
    ys = [_random_rational_matrix(rng, dim, dim) for _ in range(k)]
    b = e @ _random_rational_matrix(rng, dim, dim) @ e
    ys[l - 1] = ys[l - 1] @ b
    return cumulant(corner_functional(e), pi, ys).is_zero()
