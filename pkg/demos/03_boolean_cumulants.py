"""Boolean cumulants, Bernoulli laws and the corner expectation."""
from fractions import Fraction

from booleq.cumulants import (
    BernoulliParams,
    CumulantSpec,
    corner_insertion_vanishing,
    cumulants_from_moments,
    moments_from_cumulants,
)

# The shifted Bernoulli law with mean 1 and variance 2 has atoms 2 and -1.
ber = BernoulliParams(1, 2)
moments = [moments_from_cumulants(ber.spec(), m) for m in range(1, 9)]
print("Ber(1, 2) moments:", [str(m) for m in moments])
print("closed form:      ", [str(Fraction(2 ** (m + 1) - (-1) ** (m + 1), 3)) for m in range(1, 9)])

# Inverting the moment-cumulant relation recovers kappa_1 = 1, kappa_2 = 2 and nothing else.
rec = cumulants_from_moments(moments, "b")
print("cumulants:", {m: str(v) for m, v in rec.kappa.items()}, "support ok:", rec.ok)

# A law with nonzero mean cannot come from the pair-partition category.
rec = cumulants_from_moments([1, 1, 1], "o")
print("moments (1, 1, 1) for o: violations at orders", rec.violations)

# Even laws: cumulants of even order only.
spec = CumulantSpec("h", {2: 1, 4: Fraction(1, 2)})
print("even law moments:", [str(moments_from_cumulants(spec, m)) for m in range(1, 7)])

# Boolean cumulants of E(y) = e y e vanish when b = e b e sits inside a block.
print("corner vanishing on 20 random instances:",
      all(corner_insertion_vanishing(3, seed=s) for s in range(20)))
