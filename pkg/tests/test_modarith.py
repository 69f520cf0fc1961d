from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from sparse_expsum import PrimeField, SparsePoly, invariant_profile, is_prime, multiplicative_order, primitive_root
from sparse_expsum.modarith import divisors, factorize, min_delta_profile, min_max_gcd, primes_upto, profile_rotations

SMALL_PRIMES = [p for p in range(2, 400) if all(p % q for q in range(2, int(p**0.5) + 1))]


def test_is_prime_matches_trial_division():
    assert [n for n in range(400) if is_prime(n)] == SMALL_PRIMES


@pytest.mark.parametrize("n", [2**61 - 1, 1_000_000_007, 998244353])
def test_is_prime_large(n):
    assert is_prime(n)
    assert not is_prime(n * 3)


def test_carmichael_rejected():
    for n in (561, 1105, 1729, 2465, 3215031751):
        assert not is_prime(n)


def test_primes_upto():
    assert primes_upto(397) == SMALL_PRIMES
    assert primes_upto(1) == []


@given(st.integers(1, 10**6))
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for q, k in f.items():
        assert is_prime(q)
        prod *= q**k
    assert prod == n


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]


@pytest.mark.parametrize("p,g", [(2, 1), (3, 2), (7, 3), (23, 5), (41, 6), (71, 7)])
def test_primitive_root_smallest(p, g):
    assert primitive_root(p) == g


def test_primitive_root_rejects_composite():
    with pytest.raises(ValueError):
        primitive_root(15)


def test_multiplicative_order():
    assert multiplicative_order(2, 7) == 3
    assert multiplicative_order(3, 7) == 6
    assert multiplicative_order(1, 7) == 1
    with pytest.raises(ValueError):
        multiplicative_order(14, 7)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 31, 101, 199])
def test_tables_roundtrip(p):
    F = PrimeField(p)
    for x in range(1, p):
        assert F.pow_table[F.dlog(x)] == x
        assert F.power(F.g, F.dlog(x)) == x
    assert sorted(F.pow_table.tolist()) == list(range(1, p))
    assert F.dlog_table[0] == -1
    with pytest.raises(ValueError):
        F.pow_table[0] = 5


def test_field_rejects_composite():
    with pytest.raises(ValueError):
        PrimeField(21)


def test_monomial_values_and_subgroup():
    F = PrimeField(7)
    assert F.monomial_values(2).tolist() == [1, 4, 2, 2, 4, 1]
    assert F.subgroup(3).tolist() == [1, 2, 4]
    with pytest.raises(ValueError):
        F.subgroup(4)


def test_field_equality():
    assert PrimeField(7) == PrimeField(7)
    assert len({PrimeField(7), PrimeField(7), PrimeField(11)}) == 2


def test_sparse_poly_validation():
    with pytest.raises(ValueError):
        SparsePoly((1, 1), (1, 2))
    with pytest.raises(ValueError):
        SparsePoly((0, 1), (1, 2))
    with pytest.raises(ValueError):
        SparsePoly((1, 2), (1,))
    SparsePoly((0, 1), (1, 2), allow_constant=True)
    poly = SparsePoly((1, 2), (3, 0))
    with pytest.raises(ValueError):
        poly.check(PrimeField(7))


def test_sparse_poly_call():
    poly = SparsePoly((1, 3), (2, 5))
    assert poly(3, 7) == (2 * 3 + 5 * 27) % 7


def test_profile_binomial_example():
    F = PrimeField(31)
    pr = invariant_profile((1, 6), F)
    assert (pr.d, pr.e, pr.D, pr.Gamma, pr.Delta, pr.s, pr.r, pr.h) == (5, 1, 5, 6, 5, 6, 6, 1)
    assert pr.nu == 1


def test_profile_monomial_and_trinomial():
    F = PrimeField(13)
    mono = invariant_profile((4,), F)
    assert mono.D is None and mono.Gamma is None and mono.h is None
    tri = invariant_profile((2, 4, 8), F)
    assert tri.d == gcd(gcd(2, 6), 12) == 2
    assert tri.h is None
    assert tri.D == min_max_gcd((2, 4, 8), 12)


def test_rotations_and_min_delta():
    F = PrimeField(31)
    rots = profile_rotations((1, 6), F)
    assert [r.exponents[0] for r in rots] == [1, 6]
    assert [r.h for r in rots] == [1, 6]
    best = min_delta_profile((6, 1), F)
    assert best.Delta == min(r.Delta for r in rots)


exps = st.lists(st.integers(1, 200), min_size=2, max_size=4, unique=True)


@settings(max_examples=60)
@given(exps, st.sampled_from([13, 31, 61, 101]))
def test_profile_identities(ns, p):
    pr = invariant_profile(ns, PrimeField(p))
    q = p - 1
    assert q % pr.d == 0 and pr.d % pr.e == 0
    assert pr.d <= pr.D
    assert pr.Gamma * pr.D == q
    assert pr.Delta * pr.e == pr.d
    assert pr.s * pr.d == q and pr.r == pr.e * pr.s
