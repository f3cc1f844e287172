"""Exact scalars and dense exact linear algebra.

Everything here works over the rationals, optionally extended by a single
square root ``sqrt(n)``.  Nothing ever touches floating point.

Matrices are small (Gram matrices are indexed by interval partitions, so at
most ``2**(k-1)`` rows), which is why a dense list-of-rows representation is
good enough.  Inversion and solving use fraction-free (Bareiss) elimination on
integer-scaled rows.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt, lcm
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

Number = Union[int, Fraction, "QuadScalar"]


class Singular(ArithmeticError):
    """Raised when a matrix that must be inverted is singular."""


class Inconsistent(ArithmeticError):
    """Raised when a linear system has no solution."""


class RadicandMismatch(ArithmeticError):
    """Raised when scalars from two different quadratic fields are combined."""


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and ``r`` squarefree."""
    s, r, p = 1, n, 2
    while p * p <= r:
        while r % (p * p) == 0:
            r //= p * p
            s *= p
        p += 1
    return s, r


class QuadScalar:
    """An element ``rat + rad * sqrt(radicand)`` of a real quadratic field.

    The radicand is normalised at construction: square factors are moved into
    ``rad`` so that ``radicand`` is squarefree, and a perfect-square radicand
    folds into the rational part.  ``radicand == 0`` means a plain rational.
    Two scalars combine only if they share the radicand or one of them has no
    radical part; anything else raises :class:`RadicandMismatch`.
    """

    __slots__ = ("rat", "rad", "radicand")

    def __init__(self, rat=0, rad=0, radicand: int = 0):
        rat, rad = Fraction(rat), Fraction(rad)
        if radicand < 0:
            raise ValueError("radicand must be nonnegative")
        if radicand:
            s, r = _squarefree_split(radicand)
            rad *= s
            radicand = r
            if radicand == 1:
                rat, rad, radicand = rat + rad, Fraction(0), 0
        if rad == 0:
            radicand = 0
        elif radicand == 0:
            rad = Fraction(0)
        self.rat = rat
        self.rad = rad
        self.radicand = radicand

    @classmethod
    def sqrt(cls, n) -> "QuadScalar":
        """``sqrt(n)`` for a nonnegative rational ``n``."""
        n = Fraction(n)
        if n < 0:
            raise ValueError("negative radicand")
        # sqrt(p/q) = sqrt(p*q) / q
        return cls(0, Fraction(1, n.denominator), n.numerator * n.denominator)

    @property
    def is_rational(self) -> bool:
        return self.rad == 0

    def to_fraction(self) -> Fraction:
        if self.rad:
            raise ArithmeticError(f"{self} is irrational")
        return self.rat

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self.rat, -self.rad, self.radicand)

    def norm(self) -> Fraction:
        """Field norm ``(a + b sqrt n)(a - b sqrt n)``, always rational."""
        return self.rat * self.rat - self.rad * self.rad * self.radicand

    def _coerce(self, other) -> "QuadScalar":
        if isinstance(other, QuadScalar):
            return other
        if isinstance(other, (int, Rational)):
            return QuadScalar(other)
        return NotImplemented

    def _common(self, other: "QuadScalar") -> int:
        if self.radicand and other.radicand and self.radicand != other.radicand:
            raise RadicandMismatch(f"sqrt({self.radicand}) vs sqrt({other.radicand})")
        return self.radicand or other.radicand

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadScalar(self.rat + other.rat, self.rad + other.rad, self._common(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self.rat, -self.rad, self.radicand)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self._common(other)
        return QuadScalar(
            self.rat * other.rat + self.rad * other.rad * d,
            self.rat * other.rad + self.rad * other.rat,
            d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        nrm = other.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return self * other.conjugate() * QuadScalar(1 / nrm)

    def __rtruediv__(self, other):
        return QuadScalar(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return QuadScalar(1) / self ** (-e)
        out, base = QuadScalar(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return (self.rat, self.rad, self.radicand) == (other.rat, other.rad, other.radicand)

    def __hash__(self):
        if self.rad == 0:
            return hash(self.rat)
        return hash((self.rat, self.rad, self.radicand))

    def __bool__(self):
        return bool(self.rat) or bool(self.rad)

    def _sign(self) -> int:
        # sign of a + b*sqrt(d) without floats
        a, b, d = self.rat, self.rad, self.radicand
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d
        diff = a * a - b * b * d
        return sa if diff > 0 else (-sa if diff < 0 else 0)

    def __lt__(self, other):
        return (self - other)._sign() < 0

    def __le__(self, other):
        return (self - other)._sign() <= 0

    def __gt__(self, other):
        return (self - other)._sign() > 0

    def __ge__(self, other):
        return (self - other)._sign() >= 0

    def __abs__(self):
        return -self if self._sign() < 0 else self

    def __repr__(self):
        if not self.rad:
            return f"QuadScalar({self.rat})"
        return f"QuadScalar({self.rat} + {self.rad}*sqrt({self.radicand}))"

    def to_json(self):
        if not self.rad:
            return fraction_to_str(self.rat)
        return {"rat": fraction_to_str(self.rat), "rad": fraction_to_str(self.rad),
                "sqrt": self.radicand}


def fraction_to_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def scalar_to_json(x):
    if isinstance(x, QuadScalar):
        return x.to_json()
    return fraction_to_str(x)


def scalar_from_json(obj):
    if isinstance(obj, dict):
        return QuadScalar(parse_fraction(obj["rat"]), parse_fraction(obj["rad"]), int(obj["sqrt"]))
    return parse_fraction(obj)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


class ExactMatrix:
    """Dense matrix with ``Fraction`` (or :class:`QuadScalar`) entries.

    Immutable; all arithmetic returns new matrices.
    """

    __slots__ = ("rows", "cols", "entries", "_nonzeros", "_colnz")

    def __init__(self, entries: Iterable[Iterable[Number]]):
        ent = tuple(tuple(_as_scalar(v) for v in row) for row in entries)
        if not ent or not ent[0]:
            raise ValueError("matrix must have at least one row and column")
        cols = len(ent[0])
        if any(len(r) != cols for r in ent):
            raise ValueError("ragged rows")
        self.entries = ent
        self.rows = len(ent)
        self.cols = cols
        self._nonzeros = None
        self._colnz = None
        radicands = {v.radicand for r in ent for v in r if isinstance(v, QuadScalar) and v.radicand}
        if len(radicands) > 1:
            raise RadicandMismatch(f"entries mix radicands {sorted(radicands)}")

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[Fraction(0)] * cols for _ in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def radicand(self) -> int:
        for row in self.entries:
            for v in row:
                if isinstance(v, QuadScalar) and v.radicand:
                    return v.radicand
        return 0

    @property
    def is_rational(self) -> bool:
        return self.radicand == 0

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(zip(*self.entries))

    def nonzeros(self) -> list[tuple[int, int, Number]]:
        if self._nonzeros is None:
            self._nonzeros = [(i, j, v) for i, r in enumerate(self.entries)
                              for j, v in enumerate(r) if v]
        return self._nonzeros

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        _check_same_shape(self, other)
        return ExactMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        _check_same_shape(self, other)
        return ExactMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return ExactMatrix([[-a for a in r] for r in self.entries])

    def __mul__(self, scalar) -> "ExactMatrix":
        if isinstance(scalar, ExactMatrix):
            raise TypeError("use @ for matrix products")
        return ExactMatrix([[a * scalar for a in r] for r in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.column
            ocols = [cols(j) for j in range(other.cols)]
            return ExactMatrix([[_dot(r, c) for c in ocols] for r in self.entries])
        vec = list(other)
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [_dot(r, vec) for r in self.entries]

    def column_nonzeros(self, col: int) -> list[int]:
        """Row indices of the nonzero entries in column ``col``."""
        if self._colnz is None:
            cache: dict = {}
            for r, c, _ in self.nonzeros():
                cache.setdefault(c, []).append(r)
            self._colnz = cache
        return self._colnz.get(col, [])

    def apply_sparse(self, vec: dict) -> dict:
        """Multiply onto a sparse vector ``{index: value}``."""
        out: dict = {}
        for i, j, v in self.nonzeros():
            x = vec.get(j)
            if x:
                out[i] = out.get(i, 0) + v * x
        return {i: v for i, v in out.items() if v}

    def is_zero(self) -> bool:
        return not self.nonzeros()

    def __repr__(self):
        body = "; ".join(", ".join(str(v) for v in r) for r in self.entries)
        return f"ExactMatrix([{body}])"

    def to_json(self):
        return [[scalar_to_json(v) for v in r] for r in self.entries]


def _as_scalar(v):
    if isinstance(v, QuadScalar):
        return v if v.radicand else v.rat
    return Fraction(v)


def _dot(a: Sequence, b: Sequence):
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s = s + x * y
    return _as_scalar(s)


def _check_same_shape(a: ExactMatrix, b: ExactMatrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product ``a (x) b`` (row index ``i_a * b.rows + i_b``)."""
    return ExactMatrix(
        [[x * y for x in ra for y in rb] for ra in a.entries for rb in b.entries]
    )


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def _integer_rows(rows: list[list[Fraction]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for r in rows:
        m = 1
        for v in r:
            m = lcm(m, v.denominator)
        out.append([int(v * m) for v in r])
    return out


def _bareiss_solve(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve ``a X = b`` for square nonsingular ``a`` with fraction-free elimination.

    Rows of ``[a | b]`` are scaled to integers first; this does not change the
    solution.  Forward elimination keeps every entry integral (each step divides
    exactly by the previous pivot), back substitution is done in ``Fraction``.
    """
    n = len(a)
    m = len(b[0]) if b else 0
    aug = _integer_rows([list(ra) + list(rb) for ra, rb in zip(a, b)])
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if aug[r][k] != 0), None)
        if piv is None:
            raise Singular("matrix is singular")
        if piv != k:
            aug[k], aug[piv] = aug[piv], aug[k]
        pk = aug[k]
        akk = pk[k]
        for i in range(k + 1, n):
            ri = aug[i]
            aik = ri[k]
            for j in range(k + 1, n + m):
                ri[j] = (akk * ri[j] - aik * pk[j]) // prev
            ri[k] = 0
        prev = akk
    x = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n - 1, -1, -1):
        ri = aug[i]
        for c in range(m):
            s = Fraction(ri[n + c])
            for j in range(i + 1, n):
                if ri[j]:
                    s -= ri[j] * x[j][c]
            x[i][c] = s / ri[i]
    return x


def _gauss_jordan_inverse(m: ExactMatrix) -> ExactMatrix:
    # field elimination, used for matrices over Q(sqrt d)
    n = m.rows
    a = [list(r) + [QuadScalar(int(i == j)) for j in range(n)] for i, r in enumerate(m.entries)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            raise Singular("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = QuadScalar(1) / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return ExactMatrix([row[n:] for row in a])


def invert_matrix(m: ExactMatrix) -> ExactMatrix:
    """Exact inverse of a square matrix; raises :class:`Singular`."""
    if m.rows != m.cols:
        raise ValueError("matrix must be square")
    if not m.is_rational:
        return _gauss_jordan_inverse(m)
    eye = [[Fraction(int(i == j)) for j in range(m.rows)] for i in range(m.rows)]
    return ExactMatrix(_bareiss_solve([list(r) for r in m.entries], eye))


def determinant(m: ExactMatrix) -> Fraction:
    """Determinant of a rational square matrix (Bareiss)."""
    if m.rows != m.cols:
        raise ValueError("matrix must be square")
    rows = [list(map(Fraction, r)) for r in m.entries]
    scale = Fraction(1)
    ints = []
    for r in rows:
        d = 1
        for v in r:
            d = lcm(d, v.denominator)
        scale /= d
        ints.append([int(v * d) for v in r])
    n, sign, prev = len(ints), 1, 1
    for k in range(n - 1):
        piv = next((r for r in range(k, n) if ints[r][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            ints[k], ints[piv] = ints[piv], ints[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                ints[i][j] = (ints[k][k] * ints[i][j] - ints[i][k] * ints[k][j]) // prev
            ints[i][k] = 0
        prev = ints[k][k]
    return sign * ints[n - 1][n - 1] * scale


def solve_linear(m: ExactMatrix, rhs: Sequence) -> list[Fraction]:
    """Solve ``m x = rhs`` exactly.

    Square nonsingular systems go through Bareiss elimination.  Otherwise the
    system is solved by row reduction; a consistent underdetermined system
    returns the solution with free variables set to zero, an inconsistent one
    raises :class:`Inconsistent`.
    """
    rhs = [Fraction(v) for v in rhs]
    if len(rhs) != m.rows:
        raise ValueError("rhs length mismatch")
    if not m.is_rational:
        raise TypeError("solve_linear expects a rational matrix")
    if m.rows == m.cols:
        try:
            x = _bareiss_solve([list(r) for r in m.entries], [[v] for v in rhs])
            return [r[0] for r in x]
        except Singular:
            pass
    red, pivots = _rref([list(r) + [b] for r, b in zip(m.entries, rhs)], m.cols)
    for row in red[len(pivots):]:
        if row[-1] != 0:
            raise Inconsistent("system has no solution")
    if m.rows == m.cols and len(pivots) < m.cols:
        # consistent but singular: still honour the contract for square input
        pass
    x = [Fraction(0)] * m.cols
    for r, c in enumerate(pivots):
        x[c] = red[r][-1]
    return x


def _rref(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over the first ``ncols`` columns."""
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c] if not isinstance(a[r][c], QuadScalar) else QuadScalar(1) / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a, pivots


def nullspace_basis(m: ExactMatrix) -> list[list]:
    """Basis of the right nullspace, one vector per free column of the RREF."""
    red, pivots = _rref([list(r) for r in m.entries], m.cols)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = _as_scalar(-red[r][f])
        basis.append(v)
    return basis


def rank(m: ExactMatrix) -> int:
    return len(_rref([list(r) for r in m.entries], m.cols)[1])


def independent_columns(vectors: Iterable[Sequence[Fraction]], limit: int | None = None) -> list[list[Fraction]]:
    """Greedily keep the vectors that are independent of the ones kept so far.

    Runs incremental elimination, so memory and time scale with the rank
    rather than with the number of candidate vectors.
    """
    kept: list[list[Fraction]] = []
    reduced: list[tuple[int, list[Fraction]]] = []  # (pivot index, reduced vector)
    for v in vectors:
        w = [Fraction(x) for x in v]
        for p, r in reduced:
            if w[p]:
                f = w[p]
                w = [a - f * b for a, b in zip(w, r)]
        p = next((i for i, x in enumerate(w) if x), None)
        if p is None:
            continue
        inv = 1 / w[p]
        reduced.append((p, [x * inv for x in w]))
        kept.append([Fraction(x) for x in v])
        if limit is not None and len(kept) >= limit:
            break
    return kept


# ---------------------------------------------------------------------------
# integer-scaled numpy helpers (used for large exact 0/1-structured products)
# ---------------------------------------------------------------------------

_INT64_SAFE = 2 ** 62


def common_denominator(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = lcm(d, Fraction(v).denominator)
    return d


def scaled_integer_array(rows: Sequence[Sequence[Fraction]]) -> tuple[np.ndarray, int]:
    """Return ``(A, d)`` with ``rows == A / d`` and ``A`` integral.

    ``A`` is ``int64`` when every entry fits comfortably, else ``object``.
    """
    d = common_denominator(v for r in rows for v in r)
    ints = [[int(Fraction(v) * d) for v in r] for r in rows]
    big = max((abs(v) for r in ints for v in r), default=0)
    dtype = np.int64 if big < 2 ** 40 else object
    return np.array(ints, dtype=dtype), d


def exact_int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer matrix product that falls back to Python ints on overflow risk."""
    if a.dtype == object or b.dtype == object:
        return np.dot(a.astype(object), b.astype(object))
    amax = int(np.abs(a).max(initial=0))
    bmax = int(np.abs(b).max(initial=0))
    if amax * bmax * max(a.shape[-1], 1) < _INT64_SAFE:
        return a @ b
    return np.dot(a.astype(object), b.astype(object))


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
