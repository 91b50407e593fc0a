from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import _fraction_rank as fraction_rank
from quasithin.linalg import (AlgebraBasis, ExactMatrix, FieldSpec, VectorSpaceBasis, is_prime, nullspace,
                              product_closure, rank, reduce_and_insert, rref)

Q, F2, F3 = FieldSpec(0), FieldSpec(2), FieldSpec(3)
PRIMES = [2, 3, 5, 7, 11, 13, 101, 65537]


def unit(f, n, u, v):
    return ExactMatrix.unit(f, n, u, v)


# fields ---------------------------------------------------------------------

@pytest.mark.parametrize("c", [1, 4, -3, 9, 2.5])
def test_field_rejects_bad_characteristic(c):
    with pytest.raises(ValueError):
        FieldSpec(c)


def test_field_names_and_inverses():
    assert Q.name == "Q" and F3.name == "GF(3)"
    assert F3.inv(2) == 2
    assert Q.inv(3) == Fraction(1, 3)
    with pytest.raises(ZeroDivisionError):
        F2.inv(2)
    assert F2.bar(2) == 0 and Q.bar(2) == 2


def test_is_prime_small_values():
    assert [q for q in range(30) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_is_prime_matches_trial_division():
    def trial(q):
        return q > 1 and all(q % f for f in range(2, int(q ** 0.5) + 1))
    assert all(is_prime(q) == trial(q) for q in range(5000))
    # Carmichael number and a strong pseudoprime to several small bases
    assert not is_prime(561) and not is_prime(3215031751)
    assert is_prime(2**61 - 1)


@settings(max_examples=300)
@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_gfp_scalar_field_axioms(p, a, b, c):
    f = FieldSpec(p)
    x, y, z = (ExactMatrix.from_scalars(f, [[v]]) for v in (a, b, c))
    assert (x + y) + z == x + (y + z)
    assert x @ (y + z) == x @ y + x @ z
    assert x @ y == y @ x
    assert (x @ y) @ z == x @ (y @ z)
    assert x - x == ExactMatrix.zeros(f, (1, 1))
    if x.item(0, 0):
        assert (x.scale(f.inv(x.item(0, 0)))).item(0, 0) == 1
    # Frobenius: (x + y)^p = x^p + y^p
    assert pow(a + b, p, p) == (pow(a, p, p) + pow(b, p, p)) % p
    s = (x + y).item(0, 0)
    assert pow(s, p, p) == (pow(x.item(0, 0), p, p) + pow(y.item(0, 0), p, p)) % p


@settings(max_examples=200)
@given(st.lists(st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6), min_size=4, max_size=4))
def test_rational_entries_round_trip(vals):
    m = ExactMatrix.from_scalars(Q, vals, (2, 2))
    assert [m.item(i, j) for i in range(2) for j in range(2)] == vals
    assert m - m == ExactMatrix.zeros(Q, (2, 2))
    assert (m + m) == m.scale(2)


# matrix ops -----------------------------------------------------------------

def test_transpose_trace_and_gf2_cancellation():
    for f in (Q, F2, F3):
        e = unit(f, 3, 0, 1)
        assert e.T == unit(f, 3, 1, 0)
        assert unit(f, 3, 1, 1).trace() == 1
    J = ExactMatrix.ones(F2, (3, 3))
    assert (J + J).is_zero()


def test_large_integers_stay_exact():
    big = 2**70
    m = ExactMatrix.from_ints(Q, [[big, 1], [0, big]])
    sq = m @ m
    assert sq.item(0, 0) == big * big and sq.item(0, 1) == 2 * big
    f = FieldSpec(2**61 - 1)
    a = ExactMatrix.from_ints(f, [[2**60, 3], [5, 2**59]])
    ref = np.array([[2**60, 3], [5, 2**59]], dtype=object)
    prod = (ref.dot(ref)) % (2**61 - 1)
    assert (a @ a).tolist() == prod.tolist()


def test_field_mismatch_raises():
    with pytest.raises(ValueError):
        unit(Q, 2, 0, 0) + unit(F2, 2, 0, 0)


@settings(max_examples=200)
@given(st.sampled_from([0, 2, 3, 5]), st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_nullity(p, r, c, data):
    f = FieldSpec(p)
    vals = data.draw(st.lists(st.integers(-4, 4), min_size=r * c, max_size=r * c))
    m = ExactMatrix.from_ints(f, np.array(vals).reshape(r, c))
    red, piv = rref(m)
    assert rank(m) == len(piv)
    ns = nullspace(m)
    assert len(ns) + rank(m) == c
    for v in ns:
        assert (m @ v).is_zero()
    # rank agrees with an independent rational computation when p = 0
    if p == 0:
        assert rank(m) == fraction_rank(np.array(vals).reshape(r, c))


# vector spaces --------------------------------------------------------------

def test_reduce_and_insert_examples():
    b = VectorSpaceBasis.empty(Q, 4)
    b, ins = reduce_and_insert(b, ExactMatrix.zeros(Q, (2, 2)))
    assert not ins and b.dim == 0
    b, ins = reduce_and_insert(b, unit(Q, 2, 0, 1))
    assert ins
    b, ins = reduce_and_insert(b, unit(Q, 2, 0, 1))
    assert not ins and b.dim == 1
    g = VectorSpaceBasis.empty(F2, 4)
    g, _ = reduce_and_insert(g, ExactMatrix.identity(F2, 2))
    g, _ = reduce_and_insert(g, ExactMatrix.ones(F2, (2, 2)))
    assert g.dim == 2


def test_wrong_dimension_rejected():
    b = VectorSpaceBasis.empty(Q, 4)
    with pytest.raises(ValueError):
        b.contains(ExactMatrix.zeros(Q, (3,)))


@settings(max_examples=200)
@given(st.sampled_from([0, 2, 3]), st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5),
                                             min_size=1, max_size=6), st.randoms())
def test_span_independent_of_order(p, rows, rnd):
    f = FieldSpec(p)
    vecs = [ExactMatrix.from_ints(f, r) for r in rows]
    a = VectorSpaceBasis.spanning(f, 5, vecs)
    rnd.shuffle(vecs)
    b = VectorSpaceBasis.spanning(f, 5, vecs)
    assert a == b
    for v in vecs:
        assert a.contains(v)
        c = a.coordinates(v)
        assert c @ a.rows == v


# product closure ------------------------------------------------------------

def test_closure_examples():
    one = product_closure([ExactMatrix.identity(Q, 3)], Q)
    assert one.dim == 1
    units = product_closure([unit(Q, 2, 0, 1), unit(Q, 2, 1, 0)], Q)
    assert units.dim == 4
    with pytest.raises(ValueError):
        product_closure([], Q)
    with pytest.raises(ValueError):
        product_closure([unit(Q, 2, 0, 1), unit(Q, 3, 0, 1)], Q)


def _random_gens(data, p):
    f = FieldSpec(p)
    n = data.draw(st.integers(1, 4))
    k = data.draw(st.integers(1, 3))
    gens = [ExactMatrix.from_ints(f, np.array(data.draw(st.lists(st.integers(0, 2), min_size=n * n,
                                                                   max_size=n * n))).reshape(n, n))
            for _ in range(k)]
    return f, gens


@settings(max_examples=200)
@given(st.sampled_from([0, 2, 3]), st.data())
def test_closure_idempotent_and_closed(p, data):
    f, gens = _random_gens(data, p)
    a = product_closure(gens, f)
    assert a.is_closed()
    again = product_closure(a.matrices() or gens, f)
    assert again.space == a.space
    mats = a.matrices()
    for x in mats:
        for y in mats:
            assert a.contains(x @ y)


@settings(max_examples=200)
@given(st.sampled_from([0, 2, 3]), st.data(), st.randoms())
def test_closure_shuffle_and_strategy_invariant(p, data, rnd):
    f, gens = _random_gens(data, p)
    a = product_closure(gens, f)
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    assert product_closure(shuffled, f).space == a.space
    assert product_closure(gens, f, strategy="pairwise").space == a.space


def test_algebra_basis_coordinates():
    a = product_closure([unit(F3, 2, 0, 1), unit(F3, 2, 1, 0)], F3)
    m = ExactMatrix.from_ints(F3, [[1, 2], [0, 1]])
    assert a.from_coordinates(a.coordinates(m)) == m
    assert isinstance(a, AlgebraBasis)
