"""Haar functionals on the words ``p u_{i1 j1} ... u_{ik jk} p ... p``.

A word is a list of segments separated by ``p``; the Haar functional is
multiplicative over segments, and on a single segment ``p u_{ij} p`` it is the
entry ``H[i, j]`` of the projection onto ``Span{T_pi}``.

For ``s``, ``o`` and ``h`` there are closed forms in terms of kernels; ``b``
always goes through the Weingarten matrix.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from math import perm
from typing import Callable, Sequence

import numpy as np

from .exact import exact_int_matmul, scaled_integer_array
from .partitions import (
    Category,
    SetPartition,
    enumerate_category,
    inf_category,
    kernel,
    kernel_representatives,
    multi_indices,
    pair_partition,
)
from .weingarten import projection_matrix


class LengthMismatch(ValueError):
    """Row and column multi-indices have different lengths."""


Pair = tuple[int, int]


@dataclass(frozen=True)
class GeneratorWord:
    """``p <seg_1> p <seg_2> p ... p`` with each segment a tuple of ``(row, col)`` pairs."""

    n: int
    segments: tuple[tuple[Pair, ...], ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a word needs at least one segment")
        segs = tuple(tuple((int(a), int(b)) for a, b in seg) for seg in self.segments)
        for seg in segs:
            for a, b in seg:
                if not (1 <= a <= self.n and 1 <= b <= self.n):
                    raise ValueError(f"index pair {(a, b)} outside [{self.n}]^2")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def single(cls, n: int, i: Sequence[int], j: Sequence[int]) -> "GeneratorWord":
        if len(i) != len(j):
            raise LengthMismatch("row and column indices differ in length")
        return cls(n, (tuple(zip(i, j)),))

    @classmethod
    def parse(cls, text: str, n: int) -> "GeneratorWord":
        """Parse ``"p;11,22;p;12;p"``; ``:`` works as a separator too.

        Pairs are two digits (``12``) or dash-separated (``1-12``).  A pairs
        token not flanked by ``p`` gets one implicitly, and two consecutive
        ``p`` tokens delimit an empty segment.
        """
        tokens = [t.strip() for t in re.split(r"[;:]", text.strip()) if t.strip()]
        if not tokens:
            raise ValueError("empty word")
        segments: list[tuple[Pair, ...]] = []
        pending: list[Pair] | None = None
        seen_p = False
        for tok in tokens:
            if tok.lower() == "p":
                if pending is not None:
                    segments.append(tuple(pending))
                    pending = None
                elif seen_p:
                    segments.append(())
                seen_p = True
                continue
            pairs = [_parse_pair(s) for s in tok.split(",") if s.strip()]
            if pending is None:
                pending = pairs
            else:
                pending.extend(pairs)
        if pending is not None:
            segments.append(tuple(pending))
        if not segments:
            segments.append(())
        return cls(n, tuple(segments))

    @property
    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(a for a, _ in s) for s in self.segments]

    @property
    def cols(self) -> list[tuple[int, ...]]:
        return [tuple(b for _, b in s) for s in self.segments]

    def adjoint(self) -> "GeneratorWord":
        """The ``*``-image: generators are self-adjoint, so only the order reverses."""
        return GeneratorWord(self.n, tuple(tuple(reversed(s)) for s in reversed(self.segments)))

    def __mul__(self, other: "GeneratorWord") -> "GeneratorWord":
        """Product of two words; the two inner ``p`` merge since ``p^2 = p``."""
        if other.n != self.n:
            raise ValueError("words over different n")
        return GeneratorWord(self.n, self.segments + other.segments)

    def flat(self) -> list:
        """Letters in order: ``'p'`` or ``(row, col)``."""
        out: list = ["p"]
        for seg in self.segments:
            out.extend(seg)
            out.append("p")
        return out

    def __str__(self):
        body = ";p;".join(",".join(f"{a}{b}" if max(a, b) < 10 else f"{a}-{b}" for a, b in s)
                          for s in self.segments)
        return f"p;{body};p" if body else "p"


def _parse_pair(s: str) -> Pair:
    s = s.strip()
    if "-" in s:
        a, b = s.split("-", 1)
        return int(a), int(b)
    if len(s) == 2 and s.isdigit():
        return int(s[0]), int(s[1])
    raise ValueError(f"cannot read index pair {s!r}; use 'ij' or 'i-j'")


def _check_lengths(i: Sequence[int], j: Sequence[int]) -> None:
    if len(i) != len(j):
        raise LengthMismatch(f"lengths {len(i)} and {len(j)} differ")


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def haar_s_closed(i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """``delta(inf_I ker i, inf_I ker j) / (n (n-1)^(b-1))`` with ``b = |inf_I ker i|``."""
    _check_lengths(i, j)
    a = inf_category(Category.S, kernel(i))
    if a != inf_category(Category.S, kernel(j)):
        return Fraction(0)
    return Fraction(1, n * (n - 1) ** (a.num_blocks - 1))


def _pairs_below(i: Sequence[int]) -> bool:
    return pair_partition(len(i) // 2).leq(kernel(i))


def haar_o_closed(i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """Zero for odd length; else ``zeta(pairs <= ker i) zeta(pairs <= ker j) / n^(l/2)``."""
    _check_lengths(i, j)
    if len(i) % 2:
        return Fraction(0)
    if not (_pairs_below(i) and _pairs_below(j)):
        return Fraction(0)
    return Fraction(1, n ** (len(i) // 2))


def haar_h_closed(i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """Like the ``s`` formula but with ``inf`` taken in the even-block category."""
    _check_lengths(i, j)
    if len(i) % 2:
        return Fraction(0)
    if not (_pairs_below(i) and _pairs_below(j)):
        return Fraction(0)
    a = inf_category(Category.H, kernel(i))
    if a != inf_category(Category.H, kernel(j)):
        return Fraction(0)
    return Fraction(1, n * (n - 1) ** (a.num_blocks - 1))


CLOSED_FORMS: dict[Category, Callable] = {
    Category.S: haar_s_closed,
    Category.O: haar_o_closed,
    Category.H: haar_h_closed,
}


def segment_value(x, i: Sequence[int], j: Sequence[int], n: int, verify: bool = False) -> Fraction:
    """``h(p u_{ij} p)``; an empty segment gives ``h(p) = 1``."""
    x = Category.parse(x)
    _check_lengths(i, j)
    if len(i) == 0:
        return Fraction(1)
    closed = CLOSED_FORMS.get(x)
    if closed is None or verify:
        wein = projection_matrix(x, len(i), n).entry(i, j) if _nonempty(x, len(i)) else Fraction(0)
        if closed is not None:
            val = closed(i, j, n)
            if val != wein:
                raise ArithmeticError(f"closed form {val} != Weingarten value {wein} at {i}, {j}")
        return wein
    return closed(i, j, n)


def _nonempty(x: Category, k: int) -> bool:
    return bool(enumerate_category(x, k))


def haar_value(x, w: GeneratorWord, verify: bool = False) -> Fraction:
    """Haar functional of a word: the product of its segment values."""
    out = Fraction(1)
    for r, c in zip(w.rows, w.cols):
        out *= segment_value(x, r, c, w.n, verify=verify)
        if not out:
            break
    return out


def closed_form_table(x, k: int, n: int) -> tuple[list[SetPartition], list[list[Fraction]]]:
    """Closed-form values on kernel representatives, as a kernel x kernel table.

    The closed forms only depend on ``(ker i, ker j)``; the table is indexed
    like :class:`~booleq.weingarten.ProjectionMatrix` tables.
    """
    closed = CLOSED_FORMS[Category.parse(x)]
    reps = kernel_representatives(k, max_blocks=n)
    return [kernel(r) for r in reps], [[closed(a, b, n) for b in reps] for a in reps]


# ---------------------------------------------------------------------------
# invariance
# ---------------------------------------------------------------------------


def invariance_residual(x, i: Sequence[int], j: Sequence[int], n: int) -> Fraction:
    """``|sum_s h(p u_{is} p) h(p u_{sj} p) - h(p u_{ij} p)|`` by direct summation."""
    _check_lengths(i, j)
    k = len(i)
    total = sum((segment_value(x, i, s, n) * segment_value(x, s, j, n)
                 for s in multi_indices(n, k)), Fraction(0))
    return abs(total - segment_value(x, i, j, n))


def invariance_residual_table(x, k: int, n: int) -> Fraction:
    """Largest invariance residual over all ``(i, j)`` in ``[n]^k``.

    Since the Haar values depend only on kernels, the inner sum over ``s``
    groups into kernel classes; class ``kappa`` has ``n (n-1) ... (n-|kappa|+1)``
    members.  The result is exact.
    """
    x = Category.parse(x)
    reps = kernel_representatives(k, max_blocks=n)
    tab = [[segment_value(x, a, b, n) for b in reps] for a in reps]
    mult = [perm(n, len(set(r))) for r in reps]
    m = len(reps)
    T, d = scaled_integer_array(tab)
    weighted = T * np.array(mult, dtype=T.dtype)[None, :]
    lhs = exact_int_matmul(weighted, T)           # numerator d^2
    diff = lhs - T * d
    worst = int(np.abs(diff).max(initial=0))
    return Fraction(worst, d * d) if m else Fraction(0)


def kernel_class_sum(i: Sequence[int], pi: SetPartition, n: int) -> Fraction:
    """``sum_{s : inf_I ker s = pi} h_s(p u_{is} p)``; equals ``delta(inf_I ker i, pi)``."""
    total = Fraction(0)
    for s in multi_indices(n, len(i)):
        if inf_category(Category.S, kernel(s)) == pi:
            total += haar_s_closed(i, s, n)
    return total


# ---------------------------------------------------------------------------
# random words and positivity
# ---------------------------------------------------------------------------


def random_word(rng: random.Random, n: int, max_segments: int = 3, max_len: int = 4) -> GeneratorWord:
    segs = []
    for _ in range(rng.randint(1, max_segments)):
        length = rng.randint(0, max_len)
        segs.append(tuple((rng.randint(1, n), rng.randint(1, n)) for _ in range(length)))
    return GeneratorWord(n, tuple(segs))


@dataclass
class PositivityReport:
    category: str
    n: int
    trials: int
    minimum: Fraction
    negatives: list

    @property
    def ok(self) -> bool:
        return not self.negatives


def positivity_search(x, n: int, trials: int = 50, seed: int = 0, terms: int = 4,
                      evaluator: Callable[[GeneratorWord], Fraction] | None = None,
                      max_len: int = 3) -> PositivityReport:
    """Evaluate ``h(a* a)`` for random ``a = sum_w c_w w`` with rational ``c_w``.

    ``h(a* a) = sum_{v, w} c_v c_w h(v* w)``.  By default ``h`` is
    :func:`haar_value`; pass ``evaluator`` to evaluate through a representation.
    Negative values are collected, not raised.
    """
    x = Category.parse(x)
    rng = random.Random(seed)
    ev = evaluator or (lambda w: haar_value(x, w))
    lowest = None
    bad = []
    for _ in range(trials):
        words = [random_word(rng, n, max_segments=2, max_len=max_len) for _ in range(terms)]
        coef = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in words]
        val = sum((cv * cw * ev(v.adjoint() * w) for v, cv in zip(words, coef)
                   for w, cw in zip(words, coef)), Fraction(0))
        lowest = val if lowest is None else min(lowest, val)
        if val < 0:
            bad.append((words, coef, val))
    return PositivityReport(x.value, n, trials, lowest if lowest is not None else Fraction(0), bad)
