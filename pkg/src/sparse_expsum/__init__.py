"""Exact desk-scale toolkit for exponential sums with sparse polynomials mod p."""

from .modarith import (
    InvariantProfile,
    PrimeField,
    SparsePoly,
    invariant_profile,
    is_prime,
    multiplicative_order,
    primitive_root,
)
from .expsum import SumResult, eval_batch, eval_sum_full, eval_sum_star

__all__ = [
    "InvariantProfile",
    "PrimeField",
    "SparsePoly",
    "SumResult",
    "eval_batch",
    "eval_sum_full",
    "eval_sum_star",
    "invariant_profile",
    "is_prime",
    "multiplicative_order",
    "primitive_root",
]

__version__ = "0.1.0"
