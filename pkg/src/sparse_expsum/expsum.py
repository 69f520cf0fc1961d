"""Complete exponential sums of sparse polynomials over F_p and F_p^*.

Everything funnels through :func:`_star_sums`, which evaluates the F_p^*
part of many coefficient vectors at once: ``f(x)`` is accumulated mod p
from cached monomial columns and mapped through the field's twiddle table.
Rows are reduced with numpy's pairwise summation in increasing-x order, so a
row's value does not depend on which batch it was evaluated in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .modarith import PrimeField, SparsePoly

# Per-component rounding budget is ERROR_CONSTANT * p * eps: a few ulps per
# twiddle entry plus at most log2(p) < 31 levels of pairwise summation.
ERROR_CONSTANT = 40
_EPS = float(np.finfo(np.float64).eps)
_CHUNK_ELEMS = 1 << 21


@dataclass(frozen=True)
class SumResult:
    real_part: float
    imag_part: float
    magnitude: float
    term_count: int
    error_budget: float

    @property
    def value(self) -> complex:
        return complex(self.real_part, self.imag_part)


def error_budget(p: int) -> float:
    return ERROR_CONSTANT * p * _EPS * math.sqrt(2.0)


def _monomial_matrix(exponents: Sequence[int], field: PrimeField) -> np.ndarray:
    return np.stack([field.monomial_values(n) for n in exponents])


def _star_sums(powers: np.ndarray, coeffs: np.ndarray, field: PrimeField) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of sum over x in F_p^* for each coefficient row."""
    p = field.p
    tw = field.twiddle
    B = coeffs.shape[0]
    re = np.empty(B, dtype=np.float64)
    im = np.empty(B, dtype=np.float64)
    step = max(1, _CHUNK_ELEMS // max(1, p - 1))
    for lo in range(0, B, step):
        block = coeffs[lo : lo + step]
        vals = np.zeros((block.shape[0], p - 1), dtype=np.int64)
        for i in range(powers.shape[0]):
            vals += block[:, i, None] * powers[i][None, :]
            vals %= p
        z = tw[vals]
        re[lo : lo + step] = np.ascontiguousarray(z.real).sum(axis=1)
        im[lo : lo + step] = np.ascontiguousarray(z.imag).sum(axis=1)
    return re, im


def star_sums_array(exponents: Sequence[int], coeffs: np.ndarray, field: PrimeField) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised S* for an (B, nu+1) integer coefficient array; used by the maximizer."""
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, len(exponents))
    return _star_sums(_monomial_matrix(exponents, field), coeffs, field)


def _result(re: float, im: float, terms: int, p: int) -> SumResult:
    return SumResult(float(re), float(im), math.hypot(re, im), terms, error_budget(p))


def eval_batch(exponents: Sequence[int], coefficient_list, field: PrimeField, star: bool = False) -> list[SumResult]:
    """Evaluate the full sum (or S* with ``star=True``) for many coefficient vectors."""
    exponents = tuple(int(n) for n in exponents)
    rows = [tuple(int(a) for a in c) for c in coefficient_list]
    if not rows:
        return []
    for c in rows:
        SparsePoly(exponents, c).check(field)
    re, im = star_sums_array(exponents, np.array(rows, dtype=np.int64), field)
    p = field.p
    if star:
        return [_result(r, i, p - 1, p) for r, i in zip(re, im)]
    # x = 0 contributes e_p(0) = 1 since every exponent is positive
    return [_result(1.0 + r, i, p, p) for r, i in zip(re, im)]


def eval_sum_full(poly: SparsePoly, field: PrimeField) -> SumResult:
    """sum_{x=0}^{p-1} e_p(f(x))."""
    if poly.allow_constant and min(poly.exponents) == 0:
        raise ValueError("full sums need positive exponents")
    return eval_batch(poly.exponents, [poly.coefficients], field)[0]


def eval_sum_star(poly: SparsePoly, field: PrimeField) -> SumResult:
    """sum over x in F_p^* of e_p(f(x)); equals the full sum minus 1."""
    poly.check(field)
    re, im = star_sums_array(poly.exponents, np.array([poly.coefficients]), field)
    return _result(re[0], im[0], field.p - 1, field.p)


def direct_sum(poly: SparsePoly, p: int, star: bool = False) -> complex:
    """Term-by-term reference evaluation with ``math.fsum``; O(p * nu) Python ops."""
    xs = range(1 if star else 0, p)
    angles = [2.0 * math.pi * poly(x, p) / p for x in xs]
    return complex(math.fsum(math.cos(t) for t in angles), math.fsum(math.sin(t) for t in angles))
