import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from booleq.cumulants import BernoulliParams, CumulantSpec
from booleq.definetti import (
    InconsistentMoments,
    InvariantMomentVector,
    NCPoly,
    apply_En,
    boolean_iid_moment_vector,
    conditional_expectation_En,
    forward_invariance_check,
    id_cumulant_residual,
    moment_vectors_from_json,
    moment_vectors_to_json,
    partition_polynomial,
    partitioned_En,
    recover_cumulants,
)
from booleq.partitions import Category, SetPartition, enumerate_category
from booleq.weingarten import invertibility_threshold, partition_vector, projection_matrix


def sizes(*s):
    return SetPartition.from_sizes(s)


def test_ncpoly_arithmetic():
    a = NCPoly.monomial((1,), 2)
    b = NCPoly.monomial((2,), F(1, 2))
    assert (a * b)[(1, 2)] == 1
    assert (a + b - a) == b
    assert (a * b).norm1() == 1 and (-a).norm1() == 2
    assert (a + b).is_real()


def test_conditional_expectation_examples():
    n = 3
    E1 = conditional_expectation_En("s", n, (1,))
    assert E1 == partition_polynomial(sizes(1), n).scale(F(1, n))
    E12 = conditional_expectation_En("s", n, (1, 2))
    assert E12[(1, 2)] == F(1, 6) and E12[(1, 1)] == 0
    E11 = conditional_expectation_En("o", n, (1, 1))
    assert all(E11[(i, i)] == F(1, n) for i in range(1, n + 1)) and len(E11) == n


def test_partition_polynomial_examples():
    assert partition_polynomial(sizes(1, 1), 2) == NCPoly({w: F(1) for w in [(1, 1), (1, 2), (2, 1), (2, 2)]})
    assert partition_polynomial(sizes(2), 2) == NCPoly({(1, 1): 1, (2, 2): 1})


@pytest.mark.parametrize("x,k,n", [("s", 2, 3), ("o", 2, 3), ("h", 4, 2), ("b", 3, 2)])
def test_En_fixes_its_range(x, k, n):
    for pi in enumerate_category(x, k):
        X = partition_polynomial(pi, n)
        assert apply_En(x, n, X) == X
        assert partitioned_En(x, n, pi) == X.scale(F(1, n ** pi.num_blocks))
        # coefficient vector of X_pi is T_pi
        P = projection_matrix(x, k, n)
        vec = {w: c for w, c in X}
        assert P.apply(vec) == vec


@given(st.dictionaries(st.tuples(st.integers(1, 3), st.integers(1, 3)),
                       st.fractions(-3, 3, max_denominator=4), max_size=5))
def test_En_is_linear_and_real(terms):
    f = NCPoly(terms)
    g = NCPoly({(1, 2): 1, (3, 3): F(-1, 2)})
    lhs = apply_En("s", 3, f + g)
    assert lhs == apply_En("s", 3, f) + apply_En("s", 3, g)
    assert lhs.is_real()


def test_id_cumulant_residual_exact():
    for n in range(2, 14):
        main, _ = id_cumulant_residual("s", n, (1, 2))
        assert main == F(2, n)


def test_id_cumulant_residual_decay():
    for x in ("s", "o", "h", "b"):
        for j in [(1, 1), (1, 2)]:
            r = [id_cumulant_residual(x, n, j)[0] for n in (8, 16, 32)]
            assert r[1] <= F(3, 5) * r[0] and r[2] <= F(3, 5) * r[1]
    for j in [(1, 1, 2), (1, 2, 1)]:
        r = [id_cumulant_residual("s", n, j)[0] for n in (8, 16)]
        assert r[1] <= F(3, 5) * r[0]


def test_forward_examples():
    s2 = F(2, 3)
    assert forward_invariance_check("o", CumulantSpec("o", {2: s2}), 2, 3) == 0
    vec = boolean_iid_moment_vector(CumulantSpec("o", {2: s2}), 2, 3)
    assert vec.values == [s2 * int(v) for v in partition_vector(sizes(2), 3)]
    assert forward_invariance_check("s", CumulantSpec("s", {1: 1, 2: 1}), 3, 3) == 0
    assert forward_invariance_check("h", CumulantSpec("h", {2: 1, 4: 1}), 4, 3) == 0
    assert forward_invariance_check("b", BernoulliParams(1, 2).spec(), 4, 3) == 0
    assert forward_invariance_check("o", CumulantSpec("o", {2: 1}), 3, 3) == 0


@given(st.sampled_from(list(Category)), st.data())
def test_forward_random(x, data):
    kappa = {m: data.draw(st.fractions(-3, 3, max_denominator=4)) for m in x.L(4)}
    spec = CumulantSpec(x, kappa)
    k = data.draw(st.integers(1, 4))
    n0 = invertibility_threshold(x, k) or 1
    n = data.draw(st.integers(n0, 3)) if n0 <= 3 else n0
    assert forward_invariance_check(x, spec, k, n) == 0


def _vectors(spec, K, ns):
    x = spec.category
    out = []
    for k in range(1, K + 1):
        n0 = invertibility_threshold(x, k) or 1
        out += [boolean_iid_moment_vector(spec, k, n) for n in ns if n >= n0]
    return out


def test_recover_examples():
    spec = CumulantSpec("s", {1: 1, 2: 2})
    rec = recover_cumulants(_vectors(spec, 3, (2, 3)), "s")
    assert rec.ok and rec.spec.kappa == {1: 1, 2: 2}
    s2 = F(5, 2)
    rec = recover_cumulants(_vectors(CumulantSpec("o", {2: s2}), 4, (2, 3)), "o")
    assert rec.ok and rec.spec.kappa == {2: s2}


@pytest.mark.parametrize("x", list(Category))
def test_recover_rejects_perturbation(x):
    spec = CumulantSpec(x, {m: F(m, 3) for m in x.L(4)})
    vecs = _vectors(spec, 4, (3,))
    broken = vecs[-1]
    vals = list(broken.values)
    vals[1] += F(1, 7)
    bad = InvariantMomentVector(x, broken.k, broken.n, vals)
    with pytest.raises(InconsistentMoments):
        recover_cumulants(vecs[:-1] + [bad], x)


def test_recover_rejects_value_outside_support():
    # j = (1, 2) has no pairing below its kernel, so phi(j) must vanish
    vec = boolean_iid_moment_vector(CumulantSpec("o", {2: 1}), 2, 2)
    vals = list(vec.values)
    vals[1] = F(1)
    with pytest.raises(InconsistentMoments):
        recover_cumulants([InvariantMomentVector("o", 2, 2, vals)], "o")


def test_cross_n_conflict_reported():
    a = boolean_iid_moment_vector(CumulantSpec("s", {1: 1}), 1, 3)
    b = boolean_iid_moment_vector(CumulantSpec("s", {1: 2}), 1, 4)
    rec = recover_cumulants([a, b], "s")
    assert not rec.ok and rec.cross_n_conflicts


def test_json_round_trip():
    vecs = _vectors(CumulantSpec("b", {1: 1, 2: 2}), 2, (2,))
    obj = json.loads(json.dumps(moment_vectors_to_json("b", vecs)))
    x, back = moment_vectors_from_json(obj)
    assert x is Category.B and [v.values for v in back] == [v.values for v in vecs]
