"""Command-line interface: ``sparse-expsum <command> ...``.

Exit codes: 0 success, 1 precondition refusal (bad flags, non-prime modulus,
cap exceeded), 2 internal inconsistency (a verify check failed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import bounds as B
from . import counting as C
from . import regions as R
from .counting import CapExceeded
from .expsum import eval_sum_full, eval_sum_star
from .maximizer import (
    DEFAULT_CAP,
    FamilySpec,
    max_sum_exhaustive,
    max_sum_orbits,
    max_sum_sampled,
    resolve_threads,
    scan_family,
)
from .modarith import PrimeField, SparsePoly, invariant_profile, is_prime, primes_upto, profile_rotations

log = logging.getLogger("sparse_expsum")


class UsageError(Exception):
    code = "usage"


class Inconsistency(Exception):
    code = "inconsistency"


# ---------------------------------------------------------------------------
# output


def _fmt(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, int):
        return v
    if isinstance(v, float):
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (tuple, list)):
        return ",".join(str(_fmt(x)) for x in v)
    return v


def _csv_cell(v: Any) -> str:
    v = _fmt(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps([{k: _fmt(v) for k, v in r.items()} for r in rows], indent=2) + "\n"
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument helpers


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _field(p: int) -> PrimeField:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return PrimeField(p)


def _poly(args) -> SparsePoly:
    if args.coeffs is None:
        raise UsageError("--coeffs is required")
    return SparsePoly(args.exps, args.coeffs, allow_constant=getattr(args, "allow_constant", False))


def _threads(args) -> int:
    return resolve_threads(getattr(args, "threads", None))


# ---------------------------------------------------------------------------
# commands


def cmd_sum(args) -> list[dict]:
    F = _field(args.p)
    poly = _poly(args)
    res = eval_sum_star(poly, F) if args.star else eval_sum_full(poly, F)
    return [{
        "p": F.p, "exponents": poly.exponents, "coefficients": poly.coefficients,
        "domain": "star" if args.star else "full", "real": res.real_part, "imag": res.imag_part,
        "magnitude": res.magnitude, "terms": res.term_count, "error_budget": res.error_budget,
    }]


def cmd_max(args) -> list[dict]:
    F = _field(args.p)
    cap = args.cap_evals
    if args.method == "exhaustive":
        res = max_sum_exhaustive(args.exps, F, cap=cap, threads=_threads(args))
    elif args.method == "orbits":
        res = max_sum_orbits(args.exps, F, cap=cap, threads=_threads(args))
    else:
        res = max_sum_sampled(args.exps, F, samples=args.samples, seed=args.seed)
    return [{
        "p": F.p, "exponents": args.exps, "method": args.method, "M": res.value, "argmax": res.argmax,
        "M_star": res.star_value, "argmax_star": res.star_argmax, "evaluations": res.evaluations,
        "lower_bound": res.lower_bound,
    }]


def _profile_row(pr) -> dict:
    return {"p": pr.p, "exponents": pr.exponents, "d": pr.d, "e": pr.e, "D": pr.D, "Gamma": pr.Gamma,
            "Delta": pr.Delta, "s": pr.s, "r": pr.r, "h": pr.h}


def cmd_invariants(args) -> list[dict]:
    F = _field(args.p)
    if args.rotations:
        return [_profile_row(pr) for pr in profile_rotations(args.exps, F)]
    return [_profile_row(invariant_profile(args.exps, F))]


def cmd_count(args) -> list[dict]:
    F = _field(args.p)
    what = args.what
    row: dict = {"p": F.p, "quantity": what}
    if what == "tt":
        _need(args.t, "-t")
        row.update(t=args.t, method=args.method, value=C.t_energy(args.t, F, args.method).value)
    elif what == "energy":
        _need(args.order, "--order")
        row.update(order=args.order, value=C.subgroup_energy(args.order, F).value)
    elif what == "tnu":
        _need(args.t, "-t")
        row.update(nu=args.nu, t=args.t, value=C.t_nu_energy(args.nu, args.t, F).value)
    elif what == "hist":
        hist = C.value_histogram(_poly(args), F)
        return [{"p": F.p, "lambda": lam, "count": c} for lam, c in hist.nonzero().items()]
    elif what == "collisions":
        row.update(value=C.self_collisions(_poly(args), F))
    elif what == "roots":
        row.update(value=C.root_count(_poly(args), F))
    return [row]


def _need(value, flag: str) -> None:
    if value is None:
        raise UsageError(f"{flag} is required")


def _bound_row(b: B.BoundValue) -> dict:
    return {"name": b.name, "applicable": b.applicable, "asymptotic": b.asymptotic, "case": b.case_id,
            "value": b.value, "exceeds_trivial": b.exceeds_trivial, "reason": b.reason}


def cmd_bounds(args) -> list[dict]:
    F = _field(args.p)
    rep = B.best_bound(args.exps, F)
    rows = [_bound_row(b) for b in rep.rows]
    best_e, best_a = rep.best_explicit(), rep.best_any()
    rows.append({"name": "best_explicit", "applicable": True, "asymptotic": False, "value": best_e.value,
                 "reason": best_e.name})
    rows.append({"name": "best_any", "applicable": True, "asymptotic": best_a.asymptotic, "value": best_a.value,
                 "reason": best_a.name})
    return rows


def cmd_region(args) -> str:
    if args.which == "fig61":
        region = R.region_cor22_vs_cp11()
    elif args.which == "fig62":
        region = R.region_thm23_vs_prior()
    else:
        region = R.region_thm21_nontrivial(args.nu, feasible_only=args.feasible)
    if args.format == "json":
        return R.region_to_json(region, decimals=args.decimals)
    return R.region_to_csv(region, decimals=args.decimals)


def cmd_verify(args) -> tuple[list[dict], bool]:
    from .verify import run_checks

    only = set(args.only) if args.only else None
    results = run_checks(only)
    for r in results:
        print(r.line(), file=sys.stderr)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for r in results:
            for name, rows in r.tables.items():
                (outdir / f"{name}.{args.format}").write_text(render(rows, args.format), encoding="utf-8")
    rows = [{"criterion": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds,
             "budget": r.budget, "detail": r.detail} for r in results]
    return rows, all(r.passed for r in results)


@dataclass
class ExperimentManifest:
    primes: list[int]
    families: list[FamilySpec]
    format: str = "csv"
    path: Optional[str] = None
    cap_evals: int = DEFAULT_CAP
    cap_count: int = C.NAIVE_P_CAP
    seed: int = 0
    method: str = "orbits"
    extra: dict = dc_field(default_factory=dict)

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentManifest":
        primes = data.get("primes")
        if isinstance(primes, dict):
            lo, hi = primes["range"]
            primes = [p for p in primes_upto(hi) if p >= lo]
        if not primes:
            raise ValueError("manifest needs a nonempty 'primes' list or range")
        for p in primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        fams = []
        for f in data.get("families", []):
            fams.append(FamilySpec.parse(f) if isinstance(f, str) else FamilySpec(
                f["kind"], tuple(tuple(x) if isinstance(x, list) else x for x in f.get("exponents", ())),
                f.get("diff", 0), f.get("m_max", 10)))
        if not fams:
            raise ValueError("manifest needs at least one family")
        outputs = data.get("outputs", {})
        caps = data.get("caps", {})
        man = cls(primes, fams, outputs.get("format", "csv"), outputs.get("path"),
                  int(caps.get("evals", DEFAULT_CAP)), int(caps.get("count", C.NAIVE_P_CAP)),
                  int(data.get("seed", 0)), data.get("method", "orbits"))
        if man.cap_evals <= 0 or man.cap_count <= 0:
            raise ValueError("caps must be positive")
        return man


def cmd_report(args) -> tuple[list[dict], str, Optional[str]]:
    if args.manifest:
        man = ExperimentManifest.from_json(json.loads(Path(args.manifest).read_text()))
    else:
        if not args.primes or not args.family:
            raise UsageError("report needs --manifest or both --primes and --family")
        man = ExperimentManifest.from_json({"primes": list(args.primes), "families": args.family})
    fmt = args.format or man.format
    out = args.out or man.path
    rows = []
    for fam in man.families:
        rows.extend(scan_family(fam, man.primes, method=man.method, cap=man.cap_evals, threads=_threads(args)))
    return rows, fmt, out


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sparse-expsum", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, exps=True, coeffs=False):
        sp.add_argument("-p", type=int, required=True, help="prime modulus")
        if exps:
            sp.add_argument("--exps", type=_ints, required=True, help="comma-separated exponents")
        if coeffs:
            sp.add_argument("--coeffs", type=_ints, help="comma-separated coefficients")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--out", help="write output to PATH")

    def threads(sp):
        sp.add_argument("--threads", type=int, default=None, help="worker threads (0 = auto)")

    sp = sub.add_parser("sum", help="evaluate one exponential sum")
    common(sp, coeffs=True)
    sp.add_argument("--star", action="store_true", help="sum over nonzero x only")

    sp = sub.add_parser("max", help="exact maximum over coefficient vectors")
    common(sp)
    sp.add_argument("--method", choices=["orbits", "exhaustive", "sampled"], default="orbits")
    sp.add_argument("--cap-evals", type=int, default=DEFAULT_CAP)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    threads(sp)

    sp = sub.add_parser("invariants", help="gcd invariants of an exponent vector")
    common(sp)
    sp.add_argument("--rotations", action="store_true", help="one row per choice of base exponent")

    sp = sub.add_parser("count", help="exact counting oracles")
    sp.add_argument("what", choices=["tt", "energy", "tnu", "hist", "collisions", "roots"])
    common(sp, exps=False, coeffs=True)
    sp.add_argument("--exps", type=_ints)
    sp.add_argument("-t", type=int)
    sp.add_argument("--order", type=int)
    sp.add_argument("--nu", type=int, default=2)
    sp.add_argument("--method", choices=["naive", "histogram", "structured"], default="histogram")
    sp.add_argument("--allow-constant", action="store_true", help="permit exponent 0 (roots/hist only)")

    sp = sub.add_parser("bounds", help="evaluate the bound catalog")
    common(sp)

    sp = sub.add_parser("region", help="emit exponent-space polygons")
    sp.add_argument("which", choices=["fig61", "fig62", "thm21"])
    sp.add_argument("--nu", type=int, default=2)
    sp.add_argument("--feasible", action="store_true")
    sp.add_argument("--decimals", action="store_true", help="add 12-digit decimal columns")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out")

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--only", type=_ints, help="comma-separated criterion numbers")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--out", help="directory for ratio tables")

    sp = sub.add_parser("report", help="sweep exponent families per a manifest")
    sp.add_argument("--manifest")
    sp.add_argument("--primes", type=_ints)
    sp.add_argument("--family", action="append", help="e.g. m1_divisors, fixed:1,3, fixed_difference:6")
    sp.add_argument("--format", choices=["csv", "json"], default=None)
    sp.add_argument("--out")
    threads(sp)
    return ap


def _json_mode(argv: list[str]) -> bool:
    for i, a in enumerate(argv):
        if a == "--format=json" or (a == "--format" and i + 1 < len(argv) and argv[i + 1] == "json"):
            return True
    return False


def _fail(code: str, message: str, status: int, json_mode: bool) -> int:
    if json_mode:
        sys.stdout.write(json.dumps({"error": {"code": code, "message": message}}) + "\n")
    else:
        sys.stderr.write(f"error [{code}]: {message}\n")
    return status


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_mode = _json_mode(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("usage", str(exc), 1, json_mode)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "region":
            emit(cmd_region(args), args.out)
            return 0
        if args.command == "verify":
            rows, ok = cmd_verify(args)
            sys.stdout.write(render(rows, args.format))
            if not ok:
                raise Inconsistency("one or more verification checks failed")
            return 0
        if args.command == "report":
            rows, fmt, out = cmd_report(args)
            emit(render(rows, fmt), out)
            return 0
        handler = {"sum": cmd_sum, "max": cmd_max, "invariants": cmd_invariants,
                   "count": cmd_count, "bounds": cmd_bounds}[args.command]
        emit(render(handler(args), args.format), args.out)
        return 0
    except Inconsistency as exc:
        return _fail(exc.code, str(exc), 2, json_mode)
    except UsageError as exc:
        return _fail("usage", str(exc), 1, json_mode)
    except CapExceeded as exc:
        return _fail("cap_exceeded", str(exc), 1, json_mode)
    except ValueError as exc:
        code = "not_prime" if "not prime" in str(exc) else "invalid_argument"
        return _fail(code, str(exc), 1, json_mode)


if __name__ == "__main__":
    raise SystemExit(main())
