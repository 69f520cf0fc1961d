import itertools
from collections import Counter
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from sparse_expsum import PrimeField, SparsePoly, eval_sum_star, invariant_profile
from sparse_expsum.counting import (
    CapExceeded,
    brute_t_energy,
    lemma_ratios,
    root_count,
    self_collisions,
    self_collisions_direct,
    subgroup_energy,
    t_energy,
    t_nu_energy,
    value_histogram,
)
from sparse_expsum.modarith import divisors


def oracle_tnu(nu, t, p):
    powers = Counter(pow(u, t, p) for u in range(1, p))
    sums = Counter()
    for combo in itertools.product(powers, repeat=nu):
        w = 1
        for v in combo:
            w *= powers[v]
        sums[sum(combo) % p] += w
    return sum(c * c for c in sums.values())


@pytest.mark.parametrize("p,t,want", [(7, 3, 486), (7, 6, 1296), (5, 1, 52)])
def test_t_energy_pinned(p, t, want):
    F = PrimeField(p)
    for method in ("naive", "histogram", "structured"):
        assert t_energy(t, F, method).value == want
    assert brute_t_energy(t, p) == want


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17])
def test_t_energy_routes_agree_with_brute(p):
    F = PrimeField(p)
    for t in range(1, p):
        want = brute_t_energy(t, p)
        assert t_energy(t, F, "naive").value == want
        assert t_energy(t, F, "histogram").value == want
        assert t_energy(t, F, "structured").value == want


def test_t_energy_depends_on_gcd_only():
    F = PrimeField(31)
    for t in range(1, 61):
        assert t_energy(t, F).value == t_energy(gcd(t, 30), F).value


def test_naive_capped():
    with pytest.raises(CapExceeded):
        t_energy(2, PrimeField(103), "naive")
    assert t_energy(2, PrimeField(103), "histogram").value > 0


def test_bad_method():
    with pytest.raises(ValueError):
        t_energy(2, PrimeField(7), "fft")
    with pytest.raises(ValueError):
        t_energy(0, PrimeField(7))


def test_subgroup_energy():
    F = PrimeField(7)
    assert subgroup_energy(3, F).value == 15
    assert subgroup_energy(1, F).value == 1
    with pytest.raises(ValueError):
        subgroup_energy(4, F)


@pytest.mark.parametrize("p", [7, 11, 13])
def test_subgroup_energy_oracle(p):
    F = PrimeField(p)
    for k in divisors(p - 1):
        G = [x for x in range(1, p) if pow(x, k, p) == 1]
        want = sum(1 for a, b, c, d in itertools.product(G, repeat=4) if (a + b - c - d) % p == 0)
        assert subgroup_energy(k, F).value == want


def test_value_histogram_example():
    F = PrimeField(7)
    poly = SparsePoly((1, 3), (1, 1))
    hist = value_histogram(poly, F)
    assert hist.nonzero() == {2: 2, 3: 1, 4: 1, 5: 2}
    assert self_collisions(poly, F) == 10
    assert hist.total == 6
    assert hist[9] == hist[2]


def test_tnu_pinned():
    F7 = PrimeField(7)
    assert t_nu_energy(2, 6, F7).value == 1296
    assert t_nu_energy(3, 6, F7).value == 46656
    assert t_nu_energy(1, 3, F7).value == 18
    assert t_nu_energy(3, 1, PrimeField(5)).value == 820


@pytest.mark.parametrize("p", [5, 7, 11])
def test_tnu_oracle(p):
    F = PrimeField(p)
    for nu in (1, 2, 3):
        for t in divisors(p - 1):
            assert t_nu_energy(nu, t, F).value == oracle_tnu(nu, t, p)


def test_tnu_nu2_is_t_energy_and_nu1_closed_form():
    F = PrimeField(31)
    for t in divisors(30):
        assert t_nu_energy(2, t, F).value == t_energy(t, F).value
        assert t_nu_energy(1, t, F).value == 30 * gcd(t, 30)


def test_tnu_cap_and_range():
    with pytest.raises(CapExceeded):
        t_nu_energy(3, 1, PrimeField(2003))
    with pytest.raises(ValueError):
        t_nu_energy(4, 1, PrimeField(7))


def test_root_count_with_constant():
    F = PrimeField(7)
    # x^2 - 2 has roots 3, 4 mod 7
    assert root_count(SparsePoly((0, 2), (5, 1), allow_constant=True), F) == 2
    assert root_count(SparsePoly((0, 3), (6, 1), allow_constant=True), F) == 3


polys = st.tuples(
    st.lists(st.integers(1, 120), min_size=1, max_size=3, unique=True),
    st.lists(st.integers(1, 10**6), min_size=3, max_size=3),
)


@settings(max_examples=40)
@given(polys, st.sampled_from([7, 13, 31, 61]))
def test_collisions_two_routes(data, p):
    ns, cs = data
    poly = SparsePoly(tuple(ns), tuple(c % (p - 1) + 1 for c in cs[: len(ns)]))
    F = PrimeField(p)
    values = Counter(poly(x, p) for x in range(1, p))
    assert self_collisions(poly, F) == self_collisions_direct(poly, F) == sum(c * c for c in values.values())
    assert value_histogram(poly, F).total == p - 1


@settings(max_examples=60, deadline=None)
@given(polys, st.sampled_from([13, 31, 61]))
def test_holder_inequality(data, p):
    ns, cs = data
    poly = SparsePoly(tuple(ns), tuple(c % (p - 1) + 1 for c in cs[: len(ns)]))
    F = PrimeField(p)
    hist = value_histogram(poly, F)
    r = invariant_profile(poly, F).r
    lhs = eval_sum_star(poly, F).magnitude ** 4
    rhs = hist.total**2 * hist.square_sum() * p * t_energy(r, F).value / (p - 1) ** 4
    assert lhs <= rhs * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([13, 31, 37, 61]), st.integers(1, 200), st.integers(0, 100), st.integers(1, 10**6))
def test_h_ts_inequality(p, m, ni, seed):
    q = p - 1
    n = divisors(q)[ni % len(divisors(q))]
    if gcd(m, n) != 1 or m == n:
        return
    F = PrimeField(p)
    a, b = seed % q + 1, (seed // q) % q + 1
    S = eval_sum_star(SparsePoly((m, n), (a, b)), F).magnitude
    h, s = gcd(m, q), q // n
    assert S**4 <= p * h * t_energy(s, F).value / q * (1 + 1e-9)


def test_lemma_ratios_finite():
    out = lemma_ratios(SparsePoly((1, 3), (1, 1)), PrimeField(31))
    assert set(out) == {"Q_ratio", "R_ratio"}
    assert all(v >= 0 for v in out.values())
