"""Interval partitions, the four categories and their Möbius functions.

Run with ``python3 demos/01_interval_partitions.py``.
"""
from booleq.partitions import Category, SetPartition, check_join_stable, enumerate_category, enumerate_interval
from booleq.posets import interval_poset

# There are 2^(k-1) interval partitions of [k]: one per subset of the k-1 gaps.
for k in range(1, 7):
    print(f"|I({k})| = {len(enumerate_interval(k))}")

# Each category keeps the interval partitions whose block sizes it allows.
for x in Category:
    members = ", ".join(str(p) for p in enumerate_category(x, 4))
    print(f"{x.value}(4): {members or '(empty)'}")

# I(k) is a Boolean lattice, so mu(pi, sigma) = (-1)^(|pi| - |sigma|) whenever pi <= sigma.
P = interval_poset(3)
for a in P.elements:
    row = "  ".join(f"{str(P.mobius(a, b)):>2}" for b in P.elements)
    print(f"{str(a):>10}  {row}")

# The category with blocks of size at most two is not closed under joins.
a, b = SetPartition.from_sizes((2, 1)), SetPartition.from_sizes((1, 2))
print(f"{a} v {b} = {a.join(b)}; in b(3): {Category.B.contains(a.join(b))}")
print("bad pairs in b(3):", [(str(p), str(q)) for p, q in check_join_stable("b", 3)])
