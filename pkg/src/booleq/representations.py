"""Finite models of the generators ``u_ij`` and ``p``.

``s``: on ``L^2(S_n)``, ``u_ij`` acts as the rank-one projection ``Q(P_ij)``
onto the function ``sigma -> delta(i, sigma(j))`` and ``p`` as ``Q(1)``.  The
n!-dimensional space is never formed; only the inner products

    <1, 1> = 1,  <P_ij, 1> = 1/n,
    <P_ab, P_cd> = 1/n            if (a, b) == (c, d)
                 = 0              if exactly one of a == c, b == d
                 = 1/(n(n-1))     if a != c and b != d

are used (normalised counting measure).

``o``: ``u_ij -> F_i (x) F_j / sqrt(n)``, ``p -> R (x) R`` on ``C^(n+1) (x) C^(n+1)``.

``h``: ``u_ij -> Q(P_ij) (x) F_i (x) F_j``, ``p -> Q(1) (x) R (x) R``.

Here ``F_i`` has ones at ``(i, n+1)`` and ``(n+1, i)`` and ``R`` is the
projection onto the last basis vector.

Vectors are sparse dicts ``{(perm_label, basis_index): coefficient}`` where
``perm_label`` is ``None`` for the constant function and ``(i, j)`` for
``P_ij``; the matrix factor is ``None``-free for ``s`` (basis index 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Sequence

from .exact import ExactMatrix, QuadScalar, kron
from .haar import GeneratorWord, LengthMismatch
from .partitions import (
    Category,
    EmptyDownSet,
    SetPartition,
    enumerate_category,
    inf_category,
    kernel,
    multi_indices,
)

# ---------------------------------------------------------------------------
# the L^2(S_n) factor
# ---------------------------------------------------------------------------


def perm_inner(a, b, n: int) -> Fraction:
    """``<a, b>`` for labels ``None`` (constant 1) or ``(i, j)`` (the function P_ij)."""
    if a is None and b is None:
        return Fraction(1)
    if a is None or b is None:
        return Fraction(1, n)
    (i1, j1), (i2, j2) = a, b
    same_i, same_j = i1 == i2, j1 == j2
    if same_i and same_j:
        return Fraction(1, n)
    if same_i or same_j:
        return Fraction(0)
    return Fraction(1, n * (n - 1))


def perm_inner_bruteforce(a, b, n: int) -> Fraction:
    """Same inner product by averaging over all of ``S_n`` (test oracle, small n)."""

    def f(lab, sigma):
        if lab is None:
            return 1
        i, j = lab
        return int(sigma[j - 1] == i)

    total = sum(f(a, s) * f(b, s) for s in permutations(range(1, n + 1)))
    return Fraction(total, factorial(n))


def chain_state_value(word: GeneratorWord) -> Fraction:
    """``<1, pi_s(word) 1>`` with ``pi_s(u_ij) = Q(P_ij)`` and ``pi_s(p) = Q(1)``.

    Applying a string of rank-one projections ``Q(a_1) ... Q(a_m)`` to ``1``
    gives ``prod <a_t, a_{t+1}> / prod <a_t, a_t>`` times ``a_1``, with
    ``a_{m+1} = 1``; pairing with ``1`` closes the chain.
    """
    n = word.n
    letters = [None if t == "p" else t for t in word.flat()]
    chain = [None] + letters + [None]
    num = Fraction(1)
    for a, b in zip(chain, chain[1:]):
        num *= perm_inner(a, b, n)
        if not num:
            return Fraction(0)
    den = Fraction(1)
    for a in letters:
        den *= perm_inner(a, a, n)
    return num / den


# ---------------------------------------------------------------------------
# rank-one operators on L^2(S_n): Liu's relations
# ---------------------------------------------------------------------------

RankOneSum = list  # [(coef, left_label, right_label)] meaning sum coef |left><right|


def _compose(x: RankOneSum, y: RankOneSum, n: int) -> RankOneSum:
    """``X Y`` for rank-one sums; ``|a><b| |c><d| = <b, c> |a><d|``; ``Q(v)`` is scaled by ``1/<v, v>``."""
    out = []
    for cx, a, b in x:
        for cy, c, d in y:
            v = cx * cy * perm_inner(b, c, n)
            if v:
                out.append((v, a, d))
    return out


def _normalised(label, n: int) -> RankOneSum:
    return [(1 / perm_inner(label, label, n), label, label)]


def _hs_norm2(x: RankOneSum, n: int) -> Fraction:
    """``tr(X* X) = sum_{s,t} c_s c_t <a_s, a_t> <b_t, b_s>``."""
    total = Fraction(0)
    for cs, a_s, b_s in x:
        for ct, a_t, b_t in x:
            total += cs * ct * perm_inner(a_s, a_t, n) * perm_inner(b_t, b_s, n)
    return total


def verify_liu_relations(n: int) -> bool:
    """Check the three relations satisfied by ``Q(P_ij)`` and ``Q(1)`` exactly.

    ``Q(P_ij1) Q(P_ij2) = delta(j1, j2) Q(P_ij1)``,
    ``Q(P_i1j) Q(P_i2j) = delta(i1, i2) Q(P_i1j)``,
    ``Q(P_ij) Q(1) = |P_ij><1|`` (with ``|1|`` of norm one).
    Each identity ``X = Y`` is tested as ``tr((X - Y)* (X - Y)) = 0``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    Q = {lab: _normalised(lab, n) for lab in [None] + [(i, j) for i in range(1, n + 1)
                                                        for j in range(1, n + 1)]}
    rng = range(1, n + 1)
    for i in rng:
        for a in rng:
            for b in rng:
                # same row
                lhs = _compose(Q[(i, a)], Q[(i, b)], n)
                rhs = Q[(i, a)] if a == b else []
                if _hs_norm2(lhs + [(-c, l, r) for c, l, r in rhs], n):
                    return False
                # same column
                lhs = _compose(Q[(a, i)], Q[(b, i)], n)
                rhs = Q[(a, i)] if a == b else []
                if _hs_norm2(lhs + [(-c, l, r) for c, l, r in rhs], n):
                    return False
    for i in rng:
        for j in rng:
            lhs = _compose(Q[(i, j)], Q[None], n)
            diff = lhs + [(Fraction(-1), (i, j), None)]
            if _hs_norm2(diff, n):
                return False
    return True


def sum_to_one(n: int) -> bool:
    """``sum_i P_ij = 1`` and ``sum_j P_ij = 1`` (as vectors, via the norm of the difference)."""
    for fixed in range(1, n + 1):
        for by_row in (True, False):
            vec = {((i, fixed) if by_row else (fixed, i)): Fraction(1) for i in range(1, n + 1)}
            vec[None] = Fraction(-1)
            if _perm_norm2(vec, n):
                return False
    return True


def _perm_norm2(vec: dict, n: int) -> Fraction:
    return sum((ca * cb * perm_inner(a, b, n) for a, ca in vec.items() for b, cb in vec.items()),
               Fraction(0))


# ---------------------------------------------------------------------------
# tensor models
# ---------------------------------------------------------------------------


def F_matrix(i: int, n: int) -> ExactMatrix:
    d = n + 1
    return ExactMatrix([[int((r, c) in ((i, d), (d, i))) for c in range(1, d + 1)]
                        for r in range(1, d + 1)])


def R_matrix(n: int) -> ExactMatrix:
    d = n + 1
    return ExactMatrix([[int(r == c == d) for c in range(1, d + 1)] for r in range(1, d + 1)])


@dataclass
class RepModel:
    """``pi_x`` for ``x`` in ``{s, o, h}`` acting on sparse tensor vectors.

    ``xi`` is the unit vector with ``pi_x(p) = |xi><xi|``; the state is
    ``a -> <xi, pi_x(a) xi>``, which is ``omega`` (for ``s``), ``omega_o`` and
    ``omega_h`` respectively.
    """

    x: Category
    n: int
    scale: object = field(init=False)
    _u: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        self.x = Category.parse(self.x)
        if self.x is Category.B:
            raise ValueError("no finite representation is provided for category b")
        if self.x is Category.O:
            self.scale = QuadScalar(1) / QuadScalar.sqrt(self.n)
        else:
            self.scale = Fraction(1)
        self.dim = 1 if self.x is Category.S else (self.n + 1) ** 2

    # matrices --------------------------------------------------------------

    @property
    def has_matrix_factor(self) -> bool:
        return self.x is not Category.S

    def U_matrix(self, i: int, j: int) -> ExactMatrix:
        """Matrix factor of ``pi_x(u_ij)`` (``F_i (x) F_j``, times ``1/sqrt(n)`` for ``o``)."""
        key = (i, j)
        if key not in self._u:
            m = kron(F_matrix(i, self.n), F_matrix(j, self.n))
            self._u[key] = m * self.scale if self.x is Category.O else m
        return self._u[key]

    def P_matrix(self) -> ExactMatrix:
        R = R_matrix(self.n)
        return kron(R, R)

    def _basis_last(self) -> int:
        return 0 if self.x is Category.S else self.dim - 1

    @property
    def xi(self) -> dict:
        return {(None, self._basis_last()): Fraction(1)}

    # action ------------------------------------------------------------------

    def apply_u(self, i: int, j: int, vec: dict) -> dict:
        out: dict = {}
        use_perm = self.x is not Category.O
        U = self.U_matrix(i, j) if self.has_matrix_factor else None
        lab = (i, j)
        if use_perm:
            norm = perm_inner(lab, lab, self.n)
        for (plab, b), c in vec.items():
            if use_perm:
                coef = c * perm_inner(lab, plab, self.n) / norm
                if not coef:
                    continue
                newlab = lab
            else:
                coef, newlab = c, plab
            if U is None:
                out[(newlab, b)] = out.get((newlab, b), 0) + coef
                continue
            for r in U.column_nonzeros(b):
                v = U[r, b]
                out[(newlab, r)] = out.get((newlab, r), 0) + coef * v
        return {k: v for k, v in out.items() if v}

    def apply_p(self, vec: dict) -> dict:
        """``|xi><xi| vec``."""
        c = self.inner(self.xi, vec)
        return {k: v * c for k, v in self.xi.items()} if c else {}

    def apply_word(self, word: GeneratorWord, vec: dict | None = None) -> dict:
        vec = dict(self.xi) if vec is None else vec
        for letter in reversed(word.flat()):
            vec = self.apply_p(vec) if letter == "p" else self.apply_u(*letter, vec)
            if not vec:
                break
        return vec

    def inner(self, v: dict, w: dict):
        """``<v, w>``; basis vectors of the matrix factor are orthonormal."""
        total = Fraction(0)
        by_basis: dict = {}
        for (lab, b), c in w.items():
            by_basis.setdefault(b, []).append((lab, c))
        for (lab, b), c in v.items():
            for lab2, c2 in by_basis.get(b, ()):
                total = total + c * c2 * perm_inner(lab, lab2, self.n)
        return total

    def norm2(self, v: dict):
        return self.inner(v, v)

    def state(self, word: GeneratorWord):
        return self.inner(self.xi, self.apply_word(word))

    # structural checks ------------------------------------------------------

    def check_structure(self) -> dict[str, bool]:
        """``P`` is an orthogonal projection, each ``U`` is self-adjoint, and
        ``R F_i^2 = R``, ``R F_i F_r = 0`` for ``i != r``."""
        out = {}
        if not self.has_matrix_factor:
            return out
        P = self.P_matrix()
        out["P projection"] = P @ P == P and P.T == P
        out["U self-adjoint"] = all(self.U_matrix(i, j).T == self.U_matrix(i, j)
                                    for i in range(1, self.n + 1) for j in range(1, self.n + 1))
        R = R_matrix(self.n)
        F = {i: F_matrix(i, self.n) for i in range(1, self.n + 1)}
        out["R F_i^2 = R"] = all(R @ F[i] @ F[i] == R for i in F)
        out["R F_i F_r = 0"] = all((R @ F[i] @ F[r]).is_zero() for i in F for r in F if i != r)
        return out


_MODELS: dict = {}


def rep_model(x, n: int) -> RepModel:
    """Shared model per ``(x, n)``; models are only read after construction."""
    key = (Category.parse(x), n)
    if key not in _MODELS:
        _MODELS[key] = RepModel(key[0], n)
    return _MODELS[key]


def _as_fraction(v) -> Fraction:
    if isinstance(v, QuadScalar):
        if not v.is_rational:
            raise ArithmeticError(f"state value {v} has a surviving radical part")
        return v.rat
    return Fraction(v)


def omega_value(x, i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """``omega_x(pi_x(p u_ij p))`` computed in the explicit model."""
    x = Category.parse(x)
    if len(i) != len(j):
        raise LengthMismatch(f"lengths {len(i)} and {len(j)} differ")
    val = _as_fraction(rep_model(x, n).state(GeneratorWord.single(n, i, j)))
    if len(i) % 2 and x is not Category.S and val:
        raise ArithmeticError("odd-length value does not vanish")
    return val


def representation_state(x, word: GeneratorWord) -> Fraction:
    """``<xi, pi_x(word) xi>`` for a whole word (several segments allowed)."""
    return _as_fraction(rep_model(x, word.n).state(word))


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------


def _block_sum(model: RepModel, pi: SetPartition, fixed: Sequence[int], vec: dict,
               summed_is_row: bool) -> dict:
    """``sum over multi-indices constant on the blocks of pi`` of ``u_{..} vec``.

    The summed index runs over ``[n]^k`` subject to ``pi <= ker``; ``fixed``
    is the other index.  ``pi`` is an interval partition, so the sum factors
    into consecutive blocks and is evaluated right to left.
    """
    n = model.n
    for block in reversed(pi.blocks):
        acc: dict = {}
        for a in range(1, n + 1):
            w = vec
            for pos in reversed(block):
                f = fixed[pos - 1]
                w = model.apply_u(a, f, w) if summed_is_row else model.apply_u(f, a, w)
                if not w:
                    break
            for key, c in w.items():
                acc[key] = acc.get(key, 0) + c
        vec = {key: c for key, c in acc.items() if c}
        if not vec:
            break
    return vec


def _is_multiple_of_xi(model: RepModel, vec: dict, c) -> bool:
    diff = dict(vec)
    for key, v in model.xi.items():
        diff[key] = diff.get(key, 0) - c * v
    diff = {key: v for key, v in diff.items() if v}
    return not diff or model.norm2(diff) == 0


def semigroup_relation_report(x, n: int, k: int) -> dict[str, bool]:
    """Every generator relation at order ``k``, by name.

    * ``sum_i u_{i j1} ... u_{i jk} p = delta(j constant) p`` and the transpose;
    * for every ``pi`` in ``D(k)``: ``sum_{pi <= ker i} u_ij p = zeta(pi, ker j) p``
      and the transpose.

    ``X p = c p`` holds iff ``X xi = c xi`` because ``pi_x(p) = |xi><xi|``.
    """
    x = Category.parse(x)
    if not x.allows(k):
        raise ValueError(f"k={k} is not in L_{x.value}")
    model = rep_model(x, n)
    top = SetPartition.one_block(k)
    report: dict[str, bool] = {}
    for pi in enumerate_category(x, k):
        for summed_is_row in (True, False):
            name = ("row" if summed_is_row else "col") + f" {pi}"
            if pi == top:
                name = "defining " + name
            report[name] = pi_relation_holds(x, n, pi, summed_is_row)
    return report


def pi_relation_holds(x, n: int, pi: SetPartition, summed_is_row: bool = True) -> bool:
    """``sum_{pi <= ker i} u_ij p = zeta(pi, ker j) p`` for every ``j`` (or the transpose).

    Works for any interval partition ``pi``, also outside the category, so
    that relations which should *fail* can be tested too.
    """
    model = rep_model(x, n)
    for fixed in multi_indices(n, pi.k):
        lhs = _block_sum(model, pi, fixed, model.xi, summed_is_row)
        if not _is_multiple_of_xi(model, lhs, int(pi.leq(kernel(fixed)))):
            return False
    return True


def verify_semigroup_relations(x, n: int, k: int) -> bool:
    return all(semigroup_relation_report(x, n, k).values())


def kernel_class_relations(x, n: int, k: int) -> dict[str, bool]:
    """``sum_{inf ker r = pi} u_{r j} p = delta(pi, inf ker j) p`` and the column version.

    For ``s`` all ``i, j`` in ``[n]^k`` are used.  For ``o`` and ``h`` the
    length is ``k`` (even) and only multi-indices above the pairing are used,
    which is where the identity is claimed; summation indices whose kernel has
    nothing of the category below it contribute to no class.
    """
    x = Category.parse(x)
    model = rep_model(x, n)
    if x is not Category.S and k % 2:
        raise ValueError("k must be even for o and h")

    def inf_or_none(idx):
        try:
            return inf_category(x, kernel(idx))
        except EmptyDownSet:
            return None

    indices = list(multi_indices(n, k))
    infs = {idx: inf_or_none(idx) for idx in indices}
    admissible = [idx for idx in indices if infs[idx] is not None]
    report = {}
    for pi in enumerate_category(x, k):
        cls = [r for r in admissible if infs[r] == pi]
        for row in (True, False):
            ok = True
            for fixed in admissible:
                acc: dict = {}
                for r in cls:
                    i, j = (r, fixed) if row else (fixed, r)
                    w = _apply_generators(model, i, j)
                    for key, c in w.items():
                        acc[key] = acc.get(key, 0) + c
                if not _is_multiple_of_xi(model, acc, int(infs[fixed] == pi)):
                    ok = False
                    break
            report[("row " if row else "col ") + str(pi)] = ok
    return report


def _apply_generators(model: RepModel, i: Sequence[int], j: Sequence[int]) -> dict:
    """``u_{i1 j1} ... u_{ik jk} xi`` (no projection on the left)."""
    vec = dict(model.xi)
    for a, b in zip(reversed(i), reversed(j)):
        vec = model.apply_u(a, b, vec)
        if not vec:
            break
    return vec


def liu_and_sum_checks(n: int) -> dict[str, bool]:
    return {"liu relations": verify_liu_relations(n), "sum to one": sum_to_one(n)}
