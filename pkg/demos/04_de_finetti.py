"""The finite, coefficient-level ingredients of the de Finetti correspondence."""
from fractions import Fraction

from booleq.cumulants import BernoulliParams, CumulantSpec
from booleq.definetti import (
    boolean_iid_moment_vector,
    conditional_expectation_En,
    forward_invariance_check,
    id_cumulant_residual,
    recover_cumulants,
)

# Boolean i.i.d. moments are fixed by H: the invariance residual is exactly zero.
for spec in (CumulantSpec("s", {1: 1, 2: 1, 3: Fraction(-1, 2)}),
             CumulantSpec("o", {2: Fraction(3, 2)}),
             CumulantSpec("h", {2: 1, 4: 1}),
             BernoulliParams(1, 2).spec()):
    res = [forward_invariance_check(spec.category, spec, k, 3) for k in range(1, 5)]
    print(f"{spec.category.value}: residuals for k=1..4 at n=3:", [str(r) for r in res])

# E_n on a word, as a polynomial in X_1, ..., X_n.
print("E_3[X_1 X_2] for s:", conditional_expectation_En("s", 3, (1, 2)))

# E_n[X_1 X_2] minus its cumulant expansion has coefficient norm exactly 2/n.
for n in (2, 4, 8, 16):
    main, _ = id_cumulant_residual("s", n, (1, 2))
    print(f"n={n:2d}: residual {main}")

# Recovery: invariant moment vectors determine the cumulants.
spec = CumulantSpec("s", {1: 1, 2: 2})
vectors = [boolean_iid_moment_vector(spec, k, n) for k in (1, 2, 3) for n in (2, 3)]
rec = recover_cumulants(vectors, "s")
print("recovered:", rec.to_json())
