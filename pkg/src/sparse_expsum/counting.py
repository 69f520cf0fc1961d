"""Exact integer counts: value histograms, collisions, roots and power-sum energies.

No floating point here.  Histograms are int64 numpy arrays (entries are at
most (p-1)**3 for the capped sizes), and every sum of squares is formed in
Python integers since T_t reaches (p-1)**4.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Literal

import numpy as np

from .modarith import PrimeField, SparsePoly, min_max_gcd

NAIVE_P_CAP = 101
NU_ENERGY_CAPS = {1: 10**6, 2: 20000, 3: 2000}


class CapExceeded(RuntimeError):
    """Raised instead of silently approximating beyond a configured cost cap."""


@dataclass(frozen=True)
class ValueHistogram:
    p: int
    counts: tuple[int, ...]

    def __getitem__(self, lam: int) -> int:
        return self.counts[lam % self.p]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def nonzero(self) -> dict[int, int]:
        return {lam: c for lam, c in enumerate(self.counts) if c}

    def square_sum(self) -> int:
        return sum(c * c for c in self.counts)


@dataclass(frozen=True)
class EnergyCount:
    value: int
    method: str


def _square_sum(hist: np.ndarray) -> int:
    return sum(c * c for c in hist.tolist())


def _bincount(values: np.ndarray, p: int) -> np.ndarray:
    return np.bincount(values.ravel(), minlength=p).astype(np.int64)


def _cyclic_convolve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    full = np.convolve(a, b)
    out = full[:p].copy()
    out[: len(full) - p] += full[p:]
    return out


def value_histogram(poly: SparsePoly, field: PrimeField) -> ValueHistogram:
    """counts[lam] = #{x in F_p^*: f(x) = lam}; total mass p - 1."""
    poly.check(field)
    return ValueHistogram(field.p, tuple(_bincount(poly.values_star(field), field.p).tolist()))


def self_collisions(poly: SparsePoly, field: PrimeField) -> int:
    """#{(x, y) in (F_p^*)^2: f(x) = f(y)} = sum of N(lam)^2."""
    return value_histogram(poly, field).square_sum()


def self_collisions_direct(poly: SparsePoly, field: PrimeField) -> int:
    """Pairwise comparison of all values; O(p^2) memory-light cross-check."""
    v = poly.values_star(field)
    return int(sum(int(np.count_nonzero(v == v[i])) for i in range(len(v))))


def root_count(poly: SparsePoly, field: PrimeField) -> int:
    """#{x in F_p^*: f(x) = 0}.  Accepts a constant term (exponent 0)."""
    poly.check(field)
    return int(np.count_nonzero(poly.values_star(field) == 0))


def power_histogram(t: int, field: PrimeField) -> np.ndarray:
    """H[lam] = #{u in F_p^*: u^t = lam}."""
    return _bincount(field.monomial_values(t), field.p)


def _t_energy_naive(t: int, field: PrimeField) -> int:
    p = field.p
    if p > NAIVE_P_CAP:
        raise CapExceeded(f"naive T_t enumeration capped at p <= {NAIVE_P_CAP}")
    pw = field.monomial_values(t)
    pair_sums = (pw[:, None] + pw[None, :]) % p
    return _square_sum(_bincount(pair_sums, p))


def _t_energy_histogram(t: int, field: PrimeField) -> int:
    p = field.p
    g = gcd(t, p - 1)
    # the k = (p-1)/g distinct t-th powers, each hit g times
    values = np.unique(field.monomial_values(t))
    pair_sums = (values[:, None] + values[None, :]) % p
    W = _bincount(pair_sums, p) * (g * g)
    return _square_sum(W)


def t_energy(t: int, field: PrimeField, method: Literal["naive", "histogram", "structured"] = "histogram") -> EnergyCount:
    """T_t = #{(u,v,x,y) in (F_p^*)^4: u^t + v^t = x^t + y^t}.

    ``naive`` forms all (p-1)^2 pair sums, ``histogram`` works with the
    k distinct power values, ``structured`` uses gcd(t,p-1)^4 * E(Gamma).
    """
    if t < 1:
        raise ValueError("t must be positive")
    if method == "naive":
        return EnergyCount(_t_energy_naive(t, field), "naive")
    if method == "histogram":
        return EnergyCount(_t_energy_histogram(t, field), "histogram")
    if method == "structured":
        g = gcd(t, field.p - 1)
        E = subgroup_energy((field.p - 1) // g, field).value
        return EnergyCount(g**4 * E, "structured")
    raise ValueError(f"unknown method {method!r}")


def subgroup_energy(order: int, field: PrimeField) -> EnergyCount:
    """Additive energy of the order-``order`` subgroup of F_p^*."""
    p = field.p
    if order < 1 or (p - 1) % order:
        raise ValueError(f"order {order} does not divide p-1={p - 1}")
    gamma = field.subgroup(order)
    pair_sums = (gamma[:, None] + gamma[None, :]) % p
    return EnergyCount(_square_sum(_bincount(pair_sums, p)), "structured")


def t_nu_energy(nu: int, t: int, field: PrimeField, cap: int | None = None) -> EnergyCount:
    """Number of solutions of u_1^t + ... + u_nu^t = v_1^t + ... + v_nu^t over F_p^*.

    ``nu`` is the number of variables on each side, so nu = 2 is T_t and
    nu = 1 counts u^t = v^t, i.e. (p-1) * gcd(t, p-1).
    """
    if not 1 <= nu <= 3:
        raise ValueError("nu must be 1, 2 or 3")
    if t < 1:
        raise ValueError("t must be positive")
    p = field.p
    cap = NU_ENERGY_CAPS[nu] if cap is None else cap
    if p > cap:
        raise CapExceeded(f"T_(nu={nu}) capped at p <= {cap}, got p={p}")
    H = power_histogram(t, field)
    W = H
    for _ in range(nu - 1):
        W = _cyclic_convolve(W, H, p)
    return EnergyCount(_square_sum(W), "histogram")


def brute_t_energy(t: int, p: int) -> int:
    """Literal quadruple loop; only for tiny p in tests and cross-checks."""
    pw = [pow(u, t, p) for u in range(1, p)]
    return sum(1 for u in pw for v in pw for x in pw for y in pw if (u + v - x - y) % p == 0)


def lemma_ratios(poly: SparsePoly, field: PrimeField) -> dict[str, float]:
    """Q / (p^{1-1/nu} D^{1/nu}) and R / (p^{2-1/nu} D^{1/nu}) for nu >= 1.

    Report-only: the root-count and collision estimates carry unspecified
    constants, so these ratios are never asserted.
    """
    nu = poly.nu
    if nu < 1:
        raise ValueError("ratios need at least two monomials")
    p = field.p
    D = min_max_gcd(poly.exponents, p - 1)
    scale = p ** (1 - 1 / nu) * D ** (1 / nu)
    return {
        "Q_ratio": root_count(poly, field) / scale,
        "R_ratio": self_collisions(poly, field) / (p * scale),
    }
