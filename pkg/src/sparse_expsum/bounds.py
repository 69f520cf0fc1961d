"""The bound catalog: classical estimates, the gcd-based piecewise bounds, and
the additive-energy estimate they rest on.

Piecewise bounds pick their row by comparing an integer key (Delta, d/e, n
or (p-1)/t) against p**(a/b).  Those comparisons are exact: ``x >= p**(a/b)``
is tested as ``x**b >= p**a`` on Python integers.  Lower thresholds are
inclusive and upper ones exclusive.

Entries whose statement hides a p**o(1) factor are flagged ``asymptotic`` and
evaluated with implied constant 1; they are for ratio reports only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction as Q
from math import gcd
from typing import Optional

from .modarith import InvariantProfile, PrimeField, SparsePoly, invariant_profile, min_delta_profile

# (lower, upper) exponent of p for the case rows, in table order; None = unbounded below.
CASE_RANGES: tuple[tuple[Optional[Q], Q], ...] = (
    (Q(29, 48), Q(2, 3)),
    (Q(59, 112), Q(29, 48)),
    (Q(1, 2), Q(59, 112)),
    (None, Q(1, 2)),
)

# Exponent rows, one per case.  Keys name the quantity the exponent applies to.
THM21_ROWS = (
    {"Delta": Q(-1, 4), "p": Q(7, 6)},
    {"Delta": Q(-21, 52), "p": Q(131, 104)},
    {"Delta": Q(-7, 20), "p": Q(197, 160)},
    {"Delta": Q(-31, 80), "p": Q(5, 4)},
)
COR22_ROWS = (
    {"e": Q(1, 4), "d": Q(0), "p": Q(11, 12)},
    {"e": Q(21, 52), "d": Q(-2, 13), "p": Q(105, 104)},
    {"e": Q(7, 20), "d": Q(-1, 10), "p": Q(157, 160)},
    {"e": Q(31, 80), "d": Q(-11, 80), "p": Q(1)},
)
THM23_ROWS = (
    {"h": Q(1, 4), "n": Q(-1, 4), "p": Q(11, 12)},
    {"h": Q(1, 4), "n": Q(-21, 52), "p": Q(105, 104)},
    {"h": Q(1, 4), "n": Q(-7, 20), "p": Q(157, 160)},
    {"h": Q(1, 4), "n": Q(-31, 80), "p": Q(1)},
)
LEMMA31_ROWS = (
    {"t": Q(1), "p": Q(8, 3)},
    {"t": Q(21, 13), "p": Q(63, 26)},
    {"t": Q(7, 5), "p": Q(101, 40)},
    {"t": Q(31, 20), "p": Q(49, 20)},
)

CP11_CONSTANT = 2.292
CP11_E_EXP = Q(13, 46)
CP11_P_EXP = Q(89, 92)


@dataclass(frozen=True)
class BoundValue:
    name: str
    value: Optional[float]
    applicable: bool
    asymptotic: bool
    case_id: Optional[int] = None
    reason: Optional[str] = None
    p: Optional[int] = None

    def __post_init__(self):
        if not self.applicable and self.value is not None:
            raise ValueError("inapplicable bound must not carry a value")
        if self.value is not None and self.value < 0:
            raise ValueError("bound values are nonnegative")

    @property
    def exceeds_trivial(self) -> bool:
        """True when the value is no better than the trivial bound p."""
        return self.value is not None and self.p is not None and self.value >= self.p


def _na(name: str, asymptotic: bool, reason: str, p: int) -> BoundValue:
    return BoundValue(name, None, False, asymptotic, None, reason, p)


def power_ge(x: int, p: int, exp: Q) -> bool:
    """Exact test of ``x >= p**exp`` for positive integers x, p."""
    return x**exp.denominator >= p**exp.numerator


def select_case(x: int, p: int) -> Optional[int]:
    """Row index 1..4 of the case table containing x, or None if x >= p^{2/3}."""
    for idx, (lo, hi) in enumerate(CASE_RANGES, start=1):
        if power_ge(x, p, hi):
            continue
        if lo is None or power_ge(x, p, lo):
            return idx
    return None


def _evaluate(row: dict, **quantities) -> float:
    logv = 0.0
    for key, ex in row.items():
        if ex:
            logv += float(ex) * math.log(quantities[key])
    return math.exp(logv)


def _exps(poly) -> tuple[int, ...]:
    return tuple(poly.exponents) if isinstance(poly, SparsePoly) else tuple(int(n) for n in poly)


def _check_binomial(m: int, n: int) -> None:
    if m == n:
        raise ValueError("binomial exponents must be distinct")
    if m < 1 or n < 1:
        raise ValueError("exponents must be positive")


def bound_trivial(field: PrimeField) -> BoundValue:
    return BoundValue("trivial", float(field.p), True, False, p=field.p)


def bound_weil(poly, field: PrimeField) -> BoundValue:
    """max(n_i) * sqrt(p), with the exponents as given (no reduction mod p-1)."""
    ns = _exps(poly)
    return BoundValue("weil", max(ns) * math.sqrt(field.p), True, False, p=field.p)


def bound_aku_gcd(m: int, n: int, field: PrimeField) -> BoundValue:
    """M_{1,n} <= p / sqrt(gcd(n, p-1))."""
    _check_binomial(m, n)
    p = field.p
    if m != 1:
        return _na("aku_gcd", False, "needs m = 1", p)
    return BoundValue("aku_gcd", p / math.sqrt(gcd(n, p - 1)), True, False, p=p)


def bound_aku56(field: PrimeField, m: int = 1, n: Optional[int] = None) -> BoundValue:
    """Uniform p^{5/6} for M_{1,n} with n | p-1; pass (m, n) to check the hypothesis."""
    p = field.p
    if n is not None and (m != 1 or (p - 1) % n):
        return _na("aku56", False, "needs m = 1 and n | p-1", p)
    return BoundValue("aku56", p ** (5 / 6), True, False, p=p)


def bound_sv45(field: PrimeField, m: int = 1, n: Optional[int] = None) -> BoundValue:
    p = field.p
    if n is not None and (m != 1 or (p - 1) % n):
        return _na("sv45", True, "needs m = 1 and n | p-1", p)
    return BoundValue("sv45", p ** 0.8, True, True, p=p)


def bound_sv(n: int, field: PrimeField) -> BoundValue:
    """M_{1,n} <= p^{3/4} + (n-1)^{1/3} p^{2/3}."""
    if n < 1:
        raise ValueError("n must be positive")
    p = field.p
    return BoundValue("sv", p**0.75 + (n - 1) ** (1 / 3) * p ** (2 / 3), True, False, p=p)


def cp11_params(m: int, n: int, p: int) -> tuple[int, int]:
    return gcd(n - m, p - 1), gcd(gcd(m, n), p - 1)


def bound_cp11(m: int, n: int, field: PrimeField) -> BoundValue:
    """d + 2.292 e^{13/46} p^{89/92} with d = gcd(n-m,p-1), e = gcd(m,n,p-1)."""
    _check_binomial(m, n)
    p = field.p
    d, e = cp11_params(m, n, p)
    value = d + CP11_CONSTANT * e ** float(CP11_E_EXP) * p ** float(CP11_P_EXP)
    return BoundValue("cp11", value, True, False, p=p)


def a65_hypothesis(m: int, n: int, p: int) -> bool:
    return (p - 1) % n == 0 and gcd(m, n) == 1


def bound_a65(m: int, n: int, field: PrimeField) -> BoundValue:
    """p/n + h^{1/2} p^{3/4}, h = gcd(m, p-1), when n | p-1 and gcd(m, n) = 1."""
    _check_binomial(m, n)
    p = field.p
    if not a65_hypothesis(m, n, p):
        return _na("a65", False, "needs n | p-1 and gcd(m,n) = 1", p)
    h = gcd(m, p - 1)
    return BoundValue("a65", p / n + math.sqrt(h) * p**0.75, True, False, p=p)


def bound_thm21(profile: InvariantProfile, nu: int, field: PrimeField) -> BoundValue:
    """Piecewise bound in Delta and Gamma for nu >= 2."""
    if nu < 2:
        raise ValueError("the Delta/Gamma bound needs nu >= 2")
    p = field.p
    case = select_case(profile.Delta, p)
    if case is None:
        return _na("thm21", True, "Delta >= p^{2/3}", p)
    row = THM21_ROWS[case - 1]
    value = _evaluate(row, Delta=profile.Delta, p=p) * profile.Gamma ** (-1.0 / (4 * nu))
    return BoundValue("thm21", value, True, True, case, p=p)


def bound_cor22(m: int, n: int, field: PrimeField) -> BoundValue:
    """Binomial specialisation, keyed by d/e."""
    _check_binomial(m, n)
    p = field.p
    d, e = cp11_params(m, n, p)
    case = select_case(d // e, p)
    if case is None:
        return _na("cor22", True, "d/e >= p^{2/3}", p)
    return BoundValue("cor22", _evaluate(COR22_ROWS[case - 1], e=e, d=d, p=p), True, True, case, p=p)


def bound_thm23(m: int, n: int, field: PrimeField) -> BoundValue:
    """Piecewise bound in h = gcd(m, p-1) and n, for n | p-1 and gcd(m, n) = 1."""
    _check_binomial(m, n)
    p = field.p
    if not a65_hypothesis(m, n, p):
        return _na("thm23", True, "needs n | p-1 and gcd(m,n) = 1", p)
    case = select_case(n, p)
    if case is None:
        return _na("thm23", True, "n >= p^{2/3}", p)
    h = gcd(m, p - 1)
    return BoundValue("thm23", _evaluate(THM23_ROWS[case - 1], h=h, n=n, p=p), True, True, case, p=p)


def bound_lemma31(t: int, field: PrimeField) -> BoundValue:
    """Energy estimate for T_t, keyed by (p-1)/t.  Compare against T_t, not M."""
    p = field.p
    if t < 1 or (p - 1) % t:
        raise ValueError(f"t={t} must divide p-1={p - 1}")
    case = select_case((p - 1) // t, p)
    if case is None:
        return _na("lemma31", True, "(p-1)/t >= p^{2/3}", p)
    return BoundValue("lemma31", _evaluate(LEMMA31_ROWS[case - 1], t=t, p=p), True, True, case, p=p)


def _renamed(b: BoundValue, name: str) -> BoundValue:
    return BoundValue(name, b.value, b.applicable, b.asymptotic, b.case_id, b.reason, b.p)


@dataclass
class BoundReport:
    p: int
    exponents: tuple[int, ...]
    rows: list[BoundValue] = dc_field(default_factory=list)

    def applicable(self) -> list[BoundValue]:
        return [b for b in self.rows if b.applicable]

    def best_explicit(self) -> BoundValue:
        return min((b for b in self.applicable() if not b.asymptotic), key=lambda b: b.value)

    def best_any(self) -> BoundValue:
        return min(self.applicable(), key=lambda b: b.value)

    def get(self, name: str) -> Optional[BoundValue]:
        for b in self.rows:
            if b.name == name:
                return b
        return None


def binomial_bounds(m: int, n: int, field: PrimeField) -> list[BoundValue]:
    """Every binomial catalog row for the ordered pair (m, n)."""
    tag = f"(m={m},n={n})"
    rows = [
        _renamed(bound_aku_gcd(m, n, field), "aku_gcd" + tag),
        _renamed(bound_aku56(field, m, n), "aku56" + tag),
        _renamed(bound_sv45(field, m, n), "sv45" + tag),
        _renamed(bound_a65(m, n, field), "a65" + tag),
        _renamed(bound_thm23(m, n, field), "thm23" + tag),
    ]
    if m == 1:
        rows.insert(1, _renamed(bound_sv(n, field), "sv" + tag))
    else:
        rows.insert(1, _na("sv" + tag, False, "needs m = 1", field.p))
    return rows


def best_bound(poly, field: PrimeField) -> BoundReport:
    """Walk the whole catalog for ``poly`` (a SparsePoly or exponent tuple)."""
    ns = _exps(poly)
    rep = BoundReport(field.p, ns)
    rep.rows.append(bound_trivial(field))
    rep.rows.append(bound_weil(ns, field))
    if len(ns) == 2:
        m, n = ns
        rep.rows.append(bound_cp11(m, n, field))
        rep.rows.append(bound_cor22(m, n, field))
        rep.rows.extend(binomial_bounds(m, n, field))
        rep.rows.extend(binomial_bounds(n, m, field))
    elif len(ns) >= 3:
        nu = len(ns) - 1
        rep.rows.append(bound_thm21(invariant_profile(ns, field), nu, field))
        rep.rows.append(_renamed(bound_thm21(min_delta_profile(ns, field), nu, field), "thm21_min_rotation"))
    return rep
