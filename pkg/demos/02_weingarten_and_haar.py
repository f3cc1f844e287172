"""From Gram matrices to Haar functionals.

The projection H onto Span{T_pi} is computed twice, once through the
Weingarten matrix and once from explicit vectors, and then compared with the
closed forms and with the representation models.
"""
from fractions import Fraction

from booleq.haar import GeneratorWord, haar_s_closed, haar_value, invariance_residual_table
from booleq.representations import representation_state
from booleq.weingarten import gram, projection_equivalence, projection_matrix, weingarten

n = 4
print("Gram matrix of I(2) at n=4:", gram("s", 2, n).to_json())
print("Weingarten matrix:       ", weingarten("s", 2, n).to_json())

# The Weingarten route stores H as a table over kernels of multi-indices.
P = projection_matrix("s", 2, n)
for kap, row in zip(P.kernels, P.table.entries):
    print(f"ker {kap}: " + " ".join(str(v) for v in row))
print("agrees with the explicit-vector oracle on all 16 x 16 entries:", projection_equivalence("s", 2, n))

# Closed form: delta(inf ker i, inf ker j) / (n (n-1)^(b-1)).
print("h_s(p u_{12,34} p) =", haar_s_closed((1, 2), (3, 4), n), "=", Fraction(1, n * (n - 1)))

# Words with several p's factor over the segments.
w = GeneratorWord.parse("p;11,22;p;13;p", n)
for x in ("s", "o", "h", "b"):
    print(f"h_{x}({w}) = {haar_value(x, w)}")
for x in ("s", "o", "h"):
    print(f"omega_{x}(pi_{x}({w})) = {representation_state(x, w)}")

# Invariance: sum_s h(p u_is p) h(p u_sj p) = h(p u_ij p) for all i, j.
for x in ("s", "o", "h", "b"):
    print(f"largest invariance residual for {x}, k=4, n=3:", invariance_residual_table(x, 4, 3))
