"""Exact maxima of |S| over all coefficient vectors with entries in [1, p-1].

Two enumerations are provided.  :func:`max_sum_exhaustive` evaluates every
tuple.  :func:`max_sum_orbits` uses that x -> c*x maps (a_i) to
(a_i c^{n_i}) without changing |S|, so one representative per orbit
suffices.  In discrete-log coordinates the action is translation by
k*(n_0, ..., n_nu) in Z_{p-1}^{nu+1}; representatives are fixed one
coordinate at a time (see :func:`orbit_steps`).

Ties closer than ``TIE_TOL`` resolve to the lexicographically smallest
coefficient vector, in both routes.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import gcd, prod
from typing import Iterable, Optional, Sequence

import numpy as np

from .bounds import best_bound
from .counting import CapExceeded
from .expsum import star_sums_array
from .modarith import PrimeField, divisors, invariant_profile, is_prime

DEFAULT_CAP = 10**8
TIE_TOL = 1e-9
_ROWS_PER_TASK = 4096


@dataclass(frozen=True)
class MaxResult:
    value: float
    argmax: tuple[int, ...]
    evaluations: int
    reduced: bool
    star_value: float
    star_argmax: tuple[int, ...]
    lower_bound: bool = False


def resolve_threads(threads: Optional[int]) -> int:
    """0 or None means auto (EXPSUM_THREADS, else the CPU count)."""
    if threads:
        return max(1, int(threads))
    env = os.environ.get("EXPSUM_THREADS")
    if env:
        n = int(env)
        if n > 0:
            return n
    return os.cpu_count() or 1


def _magnitudes(exponents: Sequence[int], coeffs: np.ndarray, field: PrimeField, threads: int = 1):
    """(|S|, |S*|) for every row of ``coeffs``; partitioned over a thread pool."""
    B = coeffs.shape[0]
    full = np.empty(B, dtype=np.float64)
    star = np.empty(B, dtype=np.float64)

    def work(lo: int) -> None:
        re, im = star_sums_array(exponents, coeffs[lo : lo + _ROWS_PER_TASK], field)
        star[lo : lo + _ROWS_PER_TASK] = np.hypot(re, im)
        full[lo : lo + _ROWS_PER_TASK] = np.hypot(re + 1.0, im)

    starts = range(0, B, _ROWS_PER_TASK)
    if threads > 1 and B > _ROWS_PER_TASK:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    else:
        for lo in starts:
            work(lo)
    return full, star


def _check_cost(rows: int, p: int, cap: int) -> None:
    if rows * p > cap:
        raise CapExceeded(f"{rows} tuples x {p} terms exceeds cap {cap}")


def _validate(exponents: Sequence[int], field: PrimeField) -> tuple[int, ...]:
    ns = tuple(int(n) for n in exponents)
    if not ns or min(ns) < 1 or len(set(ns)) != len(ns):
        raise ValueError(f"need distinct positive exponents, got {exponents}")
    return ns


def _first_tied(values: np.ndarray) -> int:
    return int(np.flatnonzero(values >= values.max() - TIE_TOL)[0])


def all_tuples(k: int, p: int) -> np.ndarray:
    """Every vector in [1, p-1]^k, lexicographically ordered."""
    grids = np.indices((p - 1,) * k, dtype=np.int64).reshape(k, -1).T
    return grids + 1


def max_sum_exhaustive(exponents: Sequence[int], field: PrimeField, cap: int = DEFAULT_CAP, threads: int = 1) -> MaxResult:
    ns = _validate(exponents, field)
    p = field.p
    rows = (p - 1) ** len(ns)
    _check_cost(rows, p, cap)
    coeffs = all_tuples(len(ns), p)
    full, star = _magnitudes(ns, coeffs, field, threads)
    i, j = _first_tied(full), _first_tied(star)
    return MaxResult(
        float(full.max()), tuple(coeffs[i].tolist()), rows, False,
        float(star.max()), tuple(coeffs[j].tolist()),
    )


def orbit_steps(exponents: Sequence[int], p: int) -> list[int]:
    """Range sizes for the discrete-log coordinates of orbit representatives.

    Coordinate j is reduced modulo the image of the shifts that fix
    coordinates 0..j-1; its product is (p-1)^{nu+1} * e / (p-1) with
    e = gcd(n_0, ..., n_nu, p-1).
    """
    q = p - 1
    kgen = 1  # generator of the current stabilizer subgroup of Z_q
    steps = []
    for n in exponents:
        step = gcd(kgen * n, q)
        steps.append(step)
        kgen = q * kgen // step
    return steps


def orbit_representatives(exponents: Sequence[int], field: PrimeField) -> np.ndarray:
    steps = orbit_steps(exponents, field.p)
    idx = np.indices(steps, dtype=np.int64).reshape(len(steps), -1).T
    return field.pow_table[idx]


def orbit_lexmin(rep: Sequence[int], exponents: Sequence[int], field: PrimeField) -> tuple[int, ...]:
    """Lexicographically smallest vector in the orbit of ``rep``."""
    p = field.p
    cols = [(a * field.monomial_values(n)) % p for a, n in zip(rep, exponents)]
    order = np.lexsort(cols[::-1])
    return tuple(int(c[order[0]]) for c in cols)


def _orbit_argmax(values: np.ndarray, reps: np.ndarray, ns, field) -> tuple[int, ...]:
    tied = np.flatnonzero(values >= values.max() - TIE_TOL)
    return min(orbit_lexmin(reps[i].tolist(), ns, field) for i in tied)


def max_sum_orbits(exponents: Sequence[int], field: PrimeField, cap: int = DEFAULT_CAP, threads: int = 1) -> MaxResult:
    ns = _validate(exponents, field)
    p = field.p
    rows = prod(orbit_steps(ns, p))
    _check_cost(rows, p, cap)
    reps = orbit_representatives(ns, field)
    full, star = _magnitudes(ns, reps, field, threads)
    return MaxResult(
        float(full.max()), _orbit_argmax(full, reps, ns, field), rows, True,
        float(star.max()), _orbit_argmax(star, reps, ns, field),
    )


def max_sum_sampled(exponents: Sequence[int], field: PrimeField, samples: int, seed: int = 0) -> MaxResult:
    """Random search; the result is only a lower bound for M."""
    ns = _validate(exponents, field)
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(1, field.p, size=(samples, len(ns)), dtype=np.int64)
    full, star = _magnitudes(ns, coeffs, field)
    i, j = int(np.argmax(full)), int(np.argmax(star))
    return MaxResult(
        float(full[i]), tuple(coeffs[i].tolist()), samples, False,
        float(star[j]), tuple(coeffs[j].tolist()), lower_bound=True,
    )


def canonical_exponents(exponents: Sequence[int], p: int) -> tuple[int, ...]:
    """Class of an exponent set under n_i -> u*n_i mod (p-1), u a unit.

    Residues are taken in [1, p-1] (0 maps to p-1), so every set in a class
    has the same M.
    """
    q = p - 1
    units = [u for u in range(1, q + 1) if gcd(u, q) == 1]
    return min(tuple(sorted((n * u - 1) % q + 1 for n in exponents)) for u in units)


class MaxCache:
    """Memoised orbit-reduced M keyed by :func:`canonical_exponents`.

    Only ``.value`` and ``.star_value`` of the returned result transfer to the
    queried exponents; the argmax refers to the canonical representative.
    """

    def __init__(self, field: PrimeField, cap: int = DEFAULT_CAP, threads: int = 1):
        self.field = field
        self.cap = cap
        self.threads = threads
        self._store: dict[tuple[int, ...], MaxResult] = {}

    def value(self, exponents: Sequence[int]) -> MaxResult:
        key = canonical_exponents(exponents, self.field.p)
        if key not in self._store:
            self._store[key] = max_sum_orbits(key, self.field, self.cap, self.threads)
        return self._store[key]

    def __len__(self) -> int:
        return len(self._store)


@dataclass(frozen=True)
class FamilySpec:
    """Exponent family for sweeps.

    kinds: ``fixed`` (one tuple), ``tuples`` (explicit list), ``m1_divisors``
    (exponents (1, n) for every n | p-1, n > 1), ``fixed_difference``
    (binomials (m, m + diff) for m = 1..m_max).
    """

    kind: str
    exponents: tuple = ()
    diff: int = 0
    m_max: int = 10

    def expand(self, p: int) -> list[tuple[int, ...]]:
        if self.kind == "fixed":
            return [tuple(self.exponents)]
        if self.kind == "tuples":
            return [tuple(t) for t in self.exponents]
        if self.kind == "m1_divisors":
            return [(1, n) for n in divisors(p - 1) if n > 1]
        if self.kind == "fixed_difference":
            if self.diff < 1:
                raise ValueError("fixed_difference needs diff >= 1")
            return [(m, m + self.diff) for m in range(1, self.m_max + 1)]
        raise ValueError(f"unknown family kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """``fixed:1,3`` | ``tuples:1,3;2,5`` | ``m1_divisors`` | ``fixed_difference:6[:m_max]``."""
        kind, _, rest = text.partition(":")
        if kind == "fixed":
            return cls(kind, tuple(int(x) for x in rest.split(",")))
        if kind == "tuples":
            return cls(kind, tuple(tuple(int(x) for x in t.split(",")) for t in rest.split(";")))
        if kind == "m1_divisors":
            return cls(kind)
        if kind == "fixed_difference":
            parts = rest.split(":")
            return cls(kind, diff=int(parts[0]), m_max=int(parts[1]) if len(parts) > 1 else 10)
        raise ValueError(f"unknown family {text!r}")


def _column_name(bound_name: str, ns: tuple[int, ...]) -> str:
    """Drop the "(m=..,n=..)" tag: plain name for the given order, "_swapped" otherwise."""
    base, sep, tag = bound_name.partition("(")
    if not sep:
        return bound_name
    return base if tag == f"m={ns[0]},n={ns[1]})" else base + "_swapped"


def scan_family(family: FamilySpec, primes: Iterable[int], method: str = "orbits",
                cap: int = DEFAULT_CAP, threads: int = 1) -> list[dict]:
    """One row per (p, exponents): M, M*, every applicable bound and M/bound."""
    out = []
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        field = PrimeField(p)
        for ns in family.expand(p):
            row: dict = {"p": p, "exponents": ",".join(map(str, ns))}
            prof = invariant_profile(ns, field)
            row.update(d=prof.d, e=prof.e, Delta=prof.Delta)
            try:
                fn = max_sum_orbits if method == "orbits" else max_sum_exhaustive
                res = fn(ns, field, cap=cap, threads=threads)
            except CapExceeded as exc:
                row["error"] = str(exc)
                out.append(row)
                continue
            row.update(M=res.value, M_star=res.star_value, evaluations=res.evaluations)
            for b in best_bound(ns, field).applicable():
                name = _column_name(b.name, ns)
                row[name] = b.value
                row[name + "_ratio"] = res.value / b.value if b.value else float("inf")
            out.append(row)
    return out
