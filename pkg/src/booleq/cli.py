"""Command-line front end: one subcommand per module, JSON (or CSV) on stdout.

Exit codes: 0 when every requested check passes, 1 when an exact check
fails, 2 on usage errors (bad flags, grids over the caps, singular input).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cumulants import (
    BernoulliParams,
    CumulantSpec,
    SupportViolation,
    cumulants_from_moments,
    moments_from_cumulants,
)
from .definetti import (
    InconsistentMoments,
    forward_invariance_check,
    moment_vectors_from_json,
    recover_cumulants,
)
from .exact import ExactMatrix, Singular, fraction_to_str, parse_fraction
from .haar import GeneratorWord, LengthMismatch, haar_value
from .partitions import Category, enumerate_category
from .posets import category_poset
from .representations import kernel_class_relations, semigroup_relation_report
from .verify import CRITERIA, run_all
from .weingarten import (
    EmptyCategory,
    gram,
    projection_entry,
    projection_equivalence,
    projection_matrix,
    weingarten,
    weingarten_estimate_residual,
)

DEFAULT_MAX_K = 6
DEFAULT_MAX_N = 8
DEFAULT_MAX_CELLS = 65536


class UsageError(Exception):
    """Bad flag value; the message names the flag."""


@dataclass
class Caps:
    max_k: int = DEFAULT_MAX_K
    max_n: int = DEFAULT_MAX_N
    max_cells: int = DEFAULT_MAX_CELLS

    @classmethod
    def from_env(cls) -> "Caps":
        raw = os.environ.get("BW_MAX_CELLS")
        if raw is None:
            return cls()
        try:
            cells = int(raw)
        except ValueError:
            raise UsageError(f"BW_MAX_CELLS={raw!r} is not an integer") from None
        return cls(max_cells=cells)

    def check(self, k: int, n: int | None = None) -> None:
        if not 1 <= k <= self.max_k:
            raise UsageError(f"--k {k} outside 1..{self.max_k}")
        if n is None:
            return
        if not 1 <= n <= self.max_n:
            raise UsageError(f"--n {n} outside 1..{self.max_n}")
        if n ** k > self.max_cells:
            raise UsageError(f"--n {n} --k {k}: n^k = {n ** k} exceeds the cap {self.max_cells} (BW_MAX_CELLS)")


# ---------------------------------------------------------------------------
# parsing helpers


def _category(text: str) -> Category:
    try:
        return Category.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown category {text!r}; use s, o, h or b") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _int_range(text: str) -> list[int]:
    """``3``, ``2..8`` or ``2,4,6``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, a range a..b or a list, got {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}") from None


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(v) for v in text.split(",") if v.strip()]


def _kappa(text: str) -> dict[int, Fraction]:
    """``1:1,2:1/2`` -> ``{1: 1, 2: 1/2}``."""
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            m, v = item.split(":", 1)
            out[int(m)] = parse_fraction(v)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"expected order:value pairs, got {item!r}") from None
    return out


# ---------------------------------------------------------------------------
# output


def _matrix_out(args, labels: list[str], M: ExactMatrix):
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([""] + labels)
        for lab, row in zip(labels, M.to_json()):
            w.writerow([lab] + row)
        return buf.getvalue()
    return {"labels": labels, "matrix": M.to_json()}


def _emit(obj) -> None:
    if isinstance(obj, str):
        sys.stdout.write(obj)
    else:
        sys.stdout.write(json.dumps(obj) + "\n")


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, ok)


def cmd_enumerate(args, caps: Caps):
    caps.check(args.k)
    return [p.to_json() for p in enumerate_category(args.category, args.k)], True


def cmd_mobius(args, caps: Caps):
    caps.check(args.k)
    members = enumerate_category(args.category, args.k)
    if not members:
        raise UsageError(f"--k {args.k}: D(k) is empty for {args.category.value}")
    poset = category_poset(args.category, args.k)
    M = ExactMatrix([[poset.mobius(a, b) for b in members] for a in members])
    return _matrix_out(args, [str(p) for p in members], M), True


def _labels(x: Category, k: int) -> list[str]:
    return [str(p) for p in enumerate_category(x, k)]


def cmd_gram(args, caps: Caps):
    caps.check(args.k, args.n)
    return _matrix_out(args, _labels(args.category, args.k), gram(args.category, args.k, args.n)), True


def cmd_weingarten(args, caps: Caps):
    caps.check(args.k, args.n)
    return _matrix_out(args, _labels(args.category, args.k), weingarten(args.category, args.k, args.n)), True


def cmd_projection(args, caps: Caps):
    caps.check(args.k, args.n)
    x, k, n = args.category, args.k, args.n
    if args.i is not None or args.j is not None:
        if args.i is None or args.j is None:
            raise UsageError("--i and --j must be given together")
        for flag, idx in (("--i", args.i), ("--j", args.j)):
            if len(idx) != k or any(not 1 <= v <= n for v in idx):
                raise UsageError(f"{flag} {','.join(map(str, idx))} is not in [{n}]^{k}")
        out = {"i": list(args.i), "j": list(args.j),
               "value": fraction_to_str(projection_entry(x, k, n, args.i, args.j))}
        ok = True
    else:
        P = projection_matrix(x, k, n)
        if args.format == "csv":
            return _matrix_out(args, [str(p) for p in P.kernels], P.table), True
        out = {"kernels": [str(p) for p in P.kernels], "table": P.table.to_json()}
        ok = True
    if args.verify:
        ok = projection_equivalence(x, k, n)
        out["oracle_agrees"] = ok
    return out, ok


def cmd_wein_residual(args, caps: Caps):
    x = args.category
    # only |D(k)| x |D(k)| matrices are built, so n is not capped here
    caps.check(args.k)
    for n in args.n:
        if n < 1:
            raise UsageError(f"--n {n} must be positive")
    members = enumerate_category(x, args.k)
    rows = []
    for n in args.n:
        for a in members:
            for b in members:
                r = weingarten_estimate_residual(x, args.k, n, a, b)
                rows.append({"n": n, "pi": str(a), "sigma": str(b), "residual": fraction_to_str(r)})
    return rows, True


def cmd_haar(args, caps: Caps):
    if not 1 <= args.n <= caps.max_n:
        raise UsageError(f"--n {args.n} outside 1..{caps.max_n}")
    try:
        word = GeneratorWord.parse(args.word, args.n)
    except (ValueError, LengthMismatch) as exc:
        raise UsageError(f"--word: {exc}") from None
    for r in word.rows:
        if r:
            caps.check(len(r), args.n)
    try:
        value = haar_value(args.category, word, verify=args.verify)
    except ArithmeticError as exc:
        return {"word": str(word), "error": str(exc)}, False
    return {"value": fraction_to_str(value)}, True


def cmd_rep_check(args, caps: Caps):
    x = args.category
    if x is Category.B:
        raise UsageError("--category b has no representation model")
    caps.check(args.k, args.n)
    if not x.allows(args.k):
        raise UsageError(f"--k {args.k} is not an allowed block size for {x.value}")
    report = semigroup_relation_report(x, args.n, args.k)
    if x is Category.S or args.k % 2 == 0:
        report.update({f"kernel class {name}": ok
                       for name, ok in kernel_class_relations(x, args.n, args.k).items()})
    return report, all(report.values())


def cmd_cumulants(args, caps: Caps):
    rec = cumulants_from_moments(args.moments, args.category)
    return rec.to_json(), rec.ok


def cmd_bernoulli(args, caps: Caps):
    try:
        p = BernoulliParams(args.mu, args.var)
    except ValueError as exc:
        raise UsageError(f"--var: {exc}") from None
    moments = [moments_from_cumulants(p.spec(), m) for m in range(1, args.m + 1)]
    return {"mu": fraction_to_str(p.mu), "var": fraction_to_str(p.var),
            "moments": [fraction_to_str(v) for v in moments]}, True


def cmd_definetti(args, caps: Caps):
    x = args.category
    try:
        spec = CumulantSpec(x, args.kappa)
    except SupportViolation as exc:
        raise UsageError(f"--kappa: {exc}") from None
    rows = []
    ok = True
    for n in args.n:
        caps.check(args.k, n)
        try:
            r = forward_invariance_check(x, spec, args.k, n)
        except Singular:
            rows.append({"n": n, "residual": None, "note": "Gram matrix singular"})
            continue
        ok &= r == 0
        rows.append({"n": n, "residual": fraction_to_str(r)})
    return {"category": x.value, "kappa": spec.to_json()["kappa"], "k": args.k, "rows": rows}, ok


def cmd_definetti_recover(args, caps: Caps):
    try:
        with open(args.moments) as fh:
            x, vecs = moment_vectors_from_json(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"--moments: {exc}") from None
    for v in vecs:
        caps.check(v.k, v.n)
    try:
        rec = recover_cumulants(vecs, x, args.K)
    except InconsistentMoments as exc:
        return {"category": x.value, "error": str(exc)}, False
    return rec.to_json(), rec.ok


def cmd_verify(args, caps: Caps):
    if not args.all and not args.criterion:
        raise UsageError("verify needs --all or --criterion")
    only = None if args.all else args.criterion
    for c in only or []:
        if not 1 <= c <= len(CRITERIA):
            raise UsageError(f"--criterion {c} outside 1..{len(CRITERIA)}")
    results = run_all(max_k=args.max_k, max_n=args.max_n, only=only)
    for r in results:
        print(r.line(), file=sys.stderr)
    return {"passed": all(r.passed for r in results), "criteria": [r.to_json() for r in results]}, \
        all(r.passed for r in results)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="booleq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, category=True, k=True, n=False, matrix=False):
        p = sub.add_parser(name, help=help_)
        if category:
            p.add_argument("--category", type=_category, default=Category.S, help="s, o, h or b")
        if k:
            p.add_argument("--k", type=int, required=True)
        if n:
            p.add_argument("--n", type=int, required=True)
        if matrix:
            p.add_argument("--format", choices=("json", "csv"), default="json")
        p.set_defaults(func=fn)
        return p

    add("enumerate", cmd_enumerate, "list D(k) in canonical order")
    add("mobius", cmd_mobius, "Möbius matrix of D(k)", matrix=True)
    add("gram", cmd_gram, "Gram matrix n^{|pi v sigma|}", n=True, matrix=True)
    add("weingarten", cmd_weingarten, "inverse of the Gram matrix", n=True, matrix=True)
    p = add("projection", cmd_projection, "projection onto Span{T_pi}", n=True, matrix=True)
    p.add_argument("--i", type=_int_list)
    p.add_argument("--j", type=_int_list)
    p.add_argument("--verify", action="store_true", help="compare with the explicit-vector oracle")
    p = add("wein-residual", cmd_wein_residual, "|n^{|pi|} W - mu| for all pairs")
    p.add_argument("--n", type=_int_range, required=True, help="e.g. 8,16,32 or 4..12")
    p = add("haar", cmd_haar, "Haar functional of a word", k=False, n=True)
    p.add_argument("--word", required=True, help='e.g. "p;11,22;p"')
    p.add_argument("--verify", action="store_true", help="cross-check closed forms against Weingarten")
    add("rep-check", cmd_rep_check, "generator relations in the representation", n=True)
    p = add("cumulants", cmd_cumulants, "Boolean cumulants from moments", k=False)
    p.add_argument("--moments", type=_fraction_list, required=True, help="E[x], E[x^2], ...")
    p = add("bernoulli", cmd_bernoulli, "moments of a shifted Bernoulli law", category=False, k=False)
    p.add_argument("--mu", type=_fraction, required=True)
    p.add_argument("--var", type=_fraction, required=True)
    p.add_argument("--m", type=int, default=10)
    p = add("definetti", cmd_definetti, "invariance residual of Boolean i.i.d. moments")
    p.add_argument("--kappa", type=_kappa, required=True, help="e.g. 1:1,2:1")
    p.add_argument("--n", type=_int_range, required=True, help="e.g. 2..8")
    p = add("definetti-recover", cmd_definetti_recover, "recover cumulants from moment vectors",
            category=False, k=False)
    p.add_argument("--moments", required=True, help="JSON file of moment vectors")
    p.add_argument("--K", type=int, default=None, help="highest order to recover")
    p = add("verify", cmd_verify, "run the acceptance checks", category=False, k=False)
    p.add_argument("--all", action="store_true")
    p.add_argument("--criterion", type=int, action="append")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--max-n", type=int, default=None)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, ok = args.func(args, Caps.from_env())
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (Singular, EmptyCategory, SupportViolation, LengthMismatch) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    _emit(payload)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
