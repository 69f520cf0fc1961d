"""End-to-end checks behind ``sparse-expsum verify``.

Each check returns a :class:`CheckResult`; hard checks fail the run, the
ratio tables are informational apart from their finiteness and
case-threshold consistency conditions.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field as dc_field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import gcd
from typing import Callable, Optional

import numpy as np

from . import bounds as B
from .counting import subgroup_energy, t_energy, value_histogram
from .expsum import eval_batch, eval_sum_star
from .maximizer import MaxCache, all_tuples, max_sum_exhaustive, max_sum_orbits
from .modarith import PrimeField, SparsePoly, divisors, invariant_profile, primes_upto
from .regions import point_in_region, region_cor22_vs_cp11, region_thm23_vs_prior, slice_region


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    budget: Optional[float] = None
    tables: dict = dc_field(default_factory=dict)

    @property
    def within_budget(self) -> bool:
        return self.budget is None or self.seconds < self.budget

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" (budget {self.budget:g}s)" if self.budget else ""
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} [{self.seconds:.2f}s{budget}]"


def _fields(limit: int, odd_only: bool = False) -> list[PrimeField]:
    return [PrimeField(p) for p in primes_upto(limit) if not (odd_only and p == 2)]


def check_gauss() -> tuple[bool, str]:
    worst = 0.0
    count = 0
    for F in _fields(199, odd_only=True):
        res = eval_batch((2,), [(a,) for a in range(1, F.p)], F)
        worst = max(worst, max(abs(r.magnitude - math.sqrt(F.p)) for r in res))
        count += len(res)
    return worst <= 1e-6, f"{count} sums, max | |S| - sqrt(p) | = {worst:.2e}"


def check_weil() -> tuple[bool, str]:
    worst = -math.inf
    count = 0
    for F in _fields(61):
        coeffs = all_tuples(2, F.p)
        for m, n in itertools.permutations(range(1, 11), 2):
            res = eval_batch((m, n), coeffs, F)
            top = max(r.magnitude for r in res)
            worst = max(worst, top - max(m, n) * math.sqrt(F.p))
            count += len(res)
    return worst <= 1e-6, f"{count} sums, max(|S| - max(m,n) sqrt(p)) = {worst:.3f}"


def check_aku() -> tuple[bool, str]:
    worst = -math.inf
    cases = 0
    for F in _fields(101):
        for n in divisors(F.p - 1):
            if n == 1:
                continue  # (1, 1) is not a binomial
            M = max_sum_exhaustive((1, n), F).value
            worst = max(worst, M - F.p / math.sqrt(gcd(n, F.p - 1)))
            cases += 1
    return worst <= 1e-6, f"{cases} (p, n) pairs, max(M - p/sqrt(gcd)) = {worst:.3f}"


def check_counting() -> tuple[bool, str]:
    bad = []
    cases = 0
    for F in _fields(61):
        for t in divisors(F.p - 1):
            naive = t_energy(t, F, "naive").value
            hist = t_energy(t, F, "histogram").value
            g = gcd(t, F.p - 1)
            structured = g**4 * subgroup_energy((F.p - 1) // g, F).value
            cases += 1
            if not naive == hist == structured:
                bad.append((F.p, t, naive, hist, structured))
    spots = {(7, 3): 486, (7, 6): 1296, (5, 1): 52}
    for (p, t), want in spots.items():
        if t_energy(t, PrimeField(p)).value != want:
            bad.append(("spot", p, t))
    return not bad, f"{cases} (p, t) pairs agree; spot values pinned" if not bad else f"mismatches: {bad[:5]}"


def holder_sides(poly: SparsePoly, F: PrimeField) -> tuple[float, float]:
    """(|S*|^4, (p-1)^-4 (sum N)^2 (sum N^2) p T_r) with exact counts on the right."""
    p = F.p
    S = eval_sum_star(poly, F).magnitude
    hist = value_histogram(poly, F)
    r = invariant_profile(poly, F).r
    Tr = t_energy(r, F).value
    rhs = Fraction(hist.total**2 * hist.square_sum() * p * Tr, (p - 1) ** 4)
    return S**4, float(rhs)


def random_polys(count: int, primes=(31, 61), seed: int = 20190612):
    rng = np.random.default_rng(seed)
    for i in range(count):
        p = primes[i % len(primes)]
        k = int(rng.integers(1, 4))
        exps = rng.choice(np.arange(1, 2 * (p - 1) + 1), size=k, replace=False)
        coeffs = rng.integers(1, p, size=k)
        yield SparsePoly(tuple(exps.tolist()), tuple(coeffs.tolist())), p


def check_holder() -> tuple[bool, str]:
    fields = {31: PrimeField(31), 61: PrimeField(61)}
    worst = -math.inf
    for poly, p in random_polys(200):
        lhs, rhs = holder_sides(poly, fields[p])
        worst = max(worst, lhs - rhs - 1e-6 * p**4)
    return worst <= 0, f"200 polynomials, max(lhs - rhs - tol) = {worst:.3g}"


def check_orbits() -> tuple[bool, str]:
    bad = []
    cases = 0
    for p in (13, 17, 31):
        F = PrimeField(p)
        for k in (2, 3):
            for ns in itertools.combinations(range(1, 9), k):
                a = max_sum_exhaustive(ns, F)
                b = max_sum_orbits(ns, F)
                cases += 1
                if abs(a.value - b.value) > 1e-9 or a.argmax != b.argmax:
                    bad.append((p, ns, a.value, b.value, a.argmax, b.argmax))
    return not bad, f"{cases} exponent sets agree" if not bad else f"mismatches: {bad[:3]}"


def check_fig61() -> tuple[bool, str]:
    region = region_cor22_vs_cp11()
    section = slice_region(region, "y", 0)
    lo = section[0].lo if section else None
    ok = (
        lo == Fraction(60, 253)
        and point_in_region((Fraction(3, 10), 0), region)
        and not point_in_region((0, 0), region)
    )
    return ok, f"gamma=0 section starts at {lo}; (3/10,0) in, (0,0) out" if ok else f"section {section}"


def check_fig62() -> tuple[bool, str]:
    region = region_thm23_vs_prior()
    cells = [c for c in region.cells if c.label.startswith("case4/")]
    lines_ok = any(
        c.edge_on(1, Fraction(31, 20), 1) and c.edge_on(Fraction(-20, 31), 1, Fraction(60, 713)) for c in cells
    )
    inside = all(x + y <= 1 for c in region.cells for x, y in c.polygon.vertices)
    inside = inside and all(sum(c.polygon.centroid()) < 1 for c in region.cells)
    strict = all(any(hp.same_line(1, 1, 1) and hp.strict for hp in c.planes) for c in region.cells)
    ok = lines_ok and inside and strict and bool(cells)
    return ok, "case (iv) edges on eps+31eta/20=1 and eta=20eps/31+60/713; region inside eps+eta<1"


def _decimal_power(base: int, num: int, den: int) -> Decimal:
    return (Decimal(base).ln() * num / den).exp()


def check_cp11_spot() -> tuple[bool, str]:
    with localcontext() as ctx:
        ctx.prec = 50
        ref = Decimal(50) + Decimal("2.292") * _decimal_power(101, 89, 92)
    got = B.bound_cp11(1, 51, PrimeField(101)).value
    rel = abs(Decimal(got) - ref) / ref
    return rel <= Decimal("1e-6"), f"cp11(101,1,51) = {got:.9f}, reference {float(ref):.9f}, rel err {float(rel):.1e}"


def ceil_root(x: int, k: int) -> int:
    """Smallest r >= 0 with r**k >= x, by bisection."""
    if x <= 0:
        return 0
    lo, hi = 0, 1
    while hi**k < x:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k >= x:
            hi = mid
        else:
            lo = mid + 1
    return lo


_THRESHOLDS = ((Fraction(2, 3), None), (Fraction(29, 48), 1), (Fraction(59, 112), 2), (Fraction(1, 2), 3))


def case_by_roots(x: int, p: int) -> Optional[int]:
    """Case lookup through integer thresholds ceil(p^{a/b}); independent of B.select_case."""
    for exp, case in _THRESHOLDS:
        if x >= ceil_root(p**exp.numerator, exp.denominator):
            return case
    return 4


def ratio_tables(pmax: int = 101):
    """M / bound rows for the d/e binomial bound and the (h, n) bound over all p <= pmax."""
    cor_rows, thm_rows, problems = [], [], []
    for F in _fields(pmax):
        p = F.p
        cache = MaxCache(F)
        for m, n in itertools.permutations(range(1, p), 2):
            d, e = gcd(n - m, p - 1), gcd(gcd(m, n), p - 1)
            cor = B.bound_cor22(m, n, F)
            want = case_by_roots(d // e, p)
            if cor.applicable != (want is not None) or cor.case_id != want:
                problems.append(("cor22", p, m, n, cor.case_id, want))
            thm = B.bound_thm23(m, n, F)
            hyp = (p - 1) % n == 0 and gcd(m, n) == 1
            want_t = case_by_roots(n, p) if hyp else None
            if thm.applicable != (want_t is not None) or thm.case_id != want_t:
                problems.append(("thm23", p, m, n, thm.case_id, want_t))
            if not (cor.applicable or thm.applicable):
                continue
            M = cache.value((m, n)).value
            if cor.applicable:
                ratio = M / cor.value
                if not math.isfinite(ratio):
                    problems.append(("cor22-ratio", p, m, n, ratio))
                cor_rows.append({"p": p, "m": m, "n": n, "d": d, "e": e, "case": cor.case_id,
                                 "M": M, "bound": cor.value, "ratio": ratio})
            if thm.applicable:
                ratio = M / thm.value
                if not math.isfinite(ratio):
                    problems.append(("thm23-ratio", p, m, n, ratio))
                thm_rows.append({"p": p, "m": m, "n": n, "h": gcd(m, p - 1), "case": thm.case_id,
                                 "M": M, "bound": thm.value, "ratio": ratio})
    return cor_rows, thm_rows, problems


def check_ratios() -> tuple[bool, str, dict]:
    cor_rows, thm_rows, problems = ratio_tables()
    mx_c = max(r["ratio"] for r in cor_rows)
    mx_t = max(r["ratio"] for r in thm_rows)
    detail = (f"{len(cor_rows)} cor22 rows (max ratio {mx_c:.3f}), {len(thm_rows)} thm23 rows "
              f"(max ratio {mx_t:.3f}); {len(problems)} inconsistencies")
    return not problems, detail, {"ratios_cor22": cor_rows, "ratios_thm23": thm_rows}


CHECKS: list[tuple[int, str, Callable, float]] = [
    (1, "gauss magnitude", check_gauss, 2.0),
    (2, "weil bound", check_weil, 60.0),
    (3, "akulinichev gcd bound", check_aku, 120.0),
    (4, "counting oracle equivalence", check_counting, 30.0),
    (5, "exact holder chain", check_holder, 60.0),
    (6, "orbit reduction soundness", check_orbits, 120.0),
    (7, "d/e binomial region", check_fig61, 1.0),
    (8, "(h, n) binomial region", check_fig62, 1.0),
    (9, "cp11 spot value", check_cp11_spot, 1.0),
    (10, "ratio reports", check_ratios, 300.0),
]


def run_checks(only: Optional[set[int]] = None) -> list[CheckResult]:
    out = []
    for number, name, fn, budget in CHECKS:
        if only and number not in only:
            continue
        t0 = time.perf_counter()
        res = fn()
        dt = time.perf_counter() - t0
        passed, detail = res[0], res[1]
        tables = res[2] if len(res) > 2 else {}
        out.append(CheckResult(number, name, passed, detail, dt, budget, tables))
    return out
