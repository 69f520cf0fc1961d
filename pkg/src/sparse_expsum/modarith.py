"""Prime-field arithmetic and the gcd invariants of sparse exponent vectors.

A :class:`PrimeField` carries the modulus together with a primitive root and
the power / discrete-log tables that every other module indexes into.  A
nonzero residue ``x = g**k`` has ``x**n = g**((k*n) % (p-1))``, so evaluating a
monomial on all of F_p^* is a single gather from ``pow_table``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import Optional, Sequence

import numpy as np

TABLE_LIMIT = 2**31

# Deterministic Miller-Rabin witnesses, correct for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; adequate for n < 2**62."""
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for q, k in factorize(n).items():
        divs = [d * q**j for d in divs for j in range(k + 1)]
    return sorted(divs)


def primitive_root(p: int) -> int:
    """Smallest positive primitive root of the prime ``p`` (1 for p = 2)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    qs = list(factorize(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def multiplicative_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    order = p - 1
    for q, k in factorize(p - 1).items():
        for _ in range(k):
            if pow(a, order // q, p) == 1:
                order //= q
            else:
                break
    return order


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, int(n**0.5) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.flatnonzero(sieve)]


class PrimeField:
    """The field F_p with primitive root ``g`` and its power/log tables.

    ``pow_table[j] = g**j mod p`` for ``0 <= j <= p-2`` and
    ``dlog_table[x] = j`` for ``x = g**j``; ``dlog_table[0]`` is -1.
    Pass ``tables=False`` for moduli beyond :data:`TABLE_LIMIT` when only
    the closed-form bounds are needed.
    """

    def __init__(self, p: int, tables: bool = True):
        p = int(p)
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if tables and p >= TABLE_LIMIT:
            raise ValueError(f"p={p} too large for table-backed field (limit 2**31)")
        self.p = p
        self.g = primitive_root(p)
        self.has_tables = tables
        if tables:
            pw = np.empty(p - 1, dtype=np.int64)
            x = 1
            for j in range(p - 1):
                pw[j] = x
                x = x * self.g % p
            dl = np.full(p, -1, dtype=np.int64)
            dl[pw] = np.arange(p - 1, dtype=np.int64)
            pw.flags.writeable = False
            dl.flags.writeable = False
            self.pow_table = pw
            self.dlog_table = dl

    def __repr__(self) -> str:
        return f"PrimeField(p={self.p}, g={self.g})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    @property
    def order(self) -> int:
        return self.p - 1

    def _need_tables(self) -> None:
        if not self.has_tables:
            raise ValueError("operation needs a table-backed field")

    def dlog(self, x: int) -> int:
        self._need_tables()
        x %= self.p
        if x == 0:
            raise ValueError("discrete log of 0 is undefined")
        return int(self.dlog_table[x])

    def power(self, x: int, n: int) -> int:
        return pow(x, n, self.p)

    @cached_property
    def _indices(self) -> np.ndarray:
        self._need_tables()
        # dlog of x for x = 1..p-1, in increasing x
        return self.dlog_table[1:].copy()

    def monomial_values(self, n: int) -> np.ndarray:
        """``x**n mod p`` for ``x = 1..p-1`` (increasing x), as int64."""
        self._need_tables()
        return self.pow_table[(self._indices * (n % (self.p - 1))) % (self.p - 1)]

    def subgroup(self, order: int) -> np.ndarray:
        """Sorted elements of the unique subgroup of F_p^* of the given order."""
        self._need_tables()
        if order < 1 or (self.p - 1) % order:
            raise ValueError(f"{order} does not divide p-1={self.p - 1}")
        step = (self.p - 1) // order
        return np.sort(self.pow_table[::step])

    @cached_property
    def twiddle(self) -> np.ndarray:
        """``exp(2*pi*i*k/p)`` for k = 0..p-1, shared by every sum over this field."""
        k = np.arange(self.p, dtype=np.float64)
        theta = 2.0 * np.pi * k / self.p
        tw = np.cos(theta) + 1j * np.sin(theta)
        tw[0] = 1.0
        tw.flags.writeable = False
        return tw


@dataclass(frozen=True)
class SparsePoly:
    """``a_0 x^{n_0} + ... + a_nu x^{n_nu}`` with distinct positive exponents.

    ``allow_constant`` admits an exponent 0, which only makes sense for
    counts on F_p^* (root counts with a normalised constant term).
    """

    exponents: tuple[int, ...]
    coefficients: tuple[int, ...]
    allow_constant: bool = False

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(n) for n in self.exponents))
        object.__setattr__(self, "coefficients", tuple(int(a) for a in self.coefficients))
        if not self.exponents:
            raise ValueError("need at least one monomial")
        if len(self.exponents) != len(self.coefficients):
            raise ValueError("exponent and coefficient vectors differ in length")
        if len(set(self.exponents)) != len(self.exponents):
            raise ValueError(f"exponents must be pairwise distinct: {self.exponents}")
        floor = 0 if self.allow_constant else 1
        if min(self.exponents) < floor:
            raise ValueError(f"exponents must be >= {floor}: {self.exponents}")

    @property
    def nu(self) -> int:
        return len(self.exponents) - 1

    def check(self, field: PrimeField) -> None:
        for a in self.coefficients:
            if not 1 <= a <= field.p - 1:
                raise ValueError(f"coefficient {a} not in [1, {field.p - 1}]")

    def __call__(self, x: int, p: int) -> int:
        return sum(a * pow(x, n, p) for a, n in zip(self.coefficients, self.exponents)) % p

    def values_star(self, field: PrimeField) -> np.ndarray:
        """f(x) mod p for x = 1..p-1."""
        p = field.p
        out = np.zeros(p - 1, dtype=np.int64)
        for a, n in zip(self.coefficients, self.exponents):
            out = (out + a * field.monomial_values(n)) % p
        return out


@dataclass(frozen=True)
class InvariantProfile:
    """gcd data attached to an exponent vector over F_p.

    ``D`` and ``Gamma`` are None for a monomial (they need two exponents);
    ``h`` is only set for binomials.
    """

    p: int
    exponents: tuple[int, ...]
    d: int
    e: int
    D: Optional[int]
    Gamma: Optional[int]
    Delta: int
    s: int
    r: int
    h: Optional[int]

    @property
    def nu(self) -> int:
        return len(self.exponents) - 1


def _exponents_of(obj) -> tuple[int, ...]:
    return tuple(obj.exponents) if isinstance(obj, SparsePoly) else tuple(int(n) for n in obj)


def min_max_gcd(exponents: Sequence[int], modulus: int) -> int:
    """``min_i max_{j != i} gcd(n_j - n_i, modulus)``."""
    return min(
        max(gcd(nj - ni, modulus) for j, nj in enumerate(exponents) if j != i)
        for i, ni in enumerate(exponents)
    )


def invariant_profile(poly, field: PrimeField) -> InvariantProfile:
    """Invariants with the first listed exponent in the role of n_0.

    ``poly`` may be a :class:`SparsePoly` or a bare exponent sequence.
    """
    ns = _exponents_of(poly)
    q = field.p - 1
    n0 = ns[0]
    d = q
    for n in ns[1:]:
        d = gcd(d, n - n0)
    e = gcd(d, n0)
    if len(ns) >= 2:
        D = min_max_gcd(ns, q)
        Gamma = q // D
    else:
        D = Gamma = None
    s = q // d
    h = gcd(n0, q) if len(ns) == 2 else None
    return InvariantProfile(
        p=field.p, exponents=ns, d=d, e=e, D=D, Gamma=Gamma,
        Delta=d // e, s=s, r=e * s, h=h,
    )


def profile_rotations(poly, field: PrimeField) -> list[InvariantProfile]:
    """One profile per choice of base exponent (cyclic relabelings)."""
    ns = _exponents_of(poly)
    return [invariant_profile(ns[i:] + ns[:i], field) for i in range(len(ns))]


def min_delta_profile(poly, field: PrimeField) -> InvariantProfile:
    """The rotation with the smallest Delta; first such rotation on ties."""
    return min(profile_rotations(poly, field), key=lambda pr: pr.Delta)
