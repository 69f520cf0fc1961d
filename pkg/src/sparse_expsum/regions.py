"""Exponent-space comparison regions, in exact rational arithmetic.

Writing every parameter as a power of p turns each bound into an affine
function of the exponents, and "bound A beats bound B" into a linear
inequality.  A two-term bound such as d + C e^{13/46} p^{89/92} has exponent
max(delta, 13 gamma/46 + 89/92), so beating it is a union of two half-plane
conditions; regions are therefore stored as unions of convex cells.  The
second branch of each union is intersected with the complement of the first
so that cells never overlap.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .bounds import CASE_RANGES, COR22_ROWS, CP11_E_EXP, CP11_P_EXP, THM21_ROWS, THM23_ROWS

F = Fraction
Point = tuple[Fraction, Fraction]

_BOX = F(2) ** 40


@dataclass(frozen=True)
class AffineForm:
    """cx * x + cy * y + c0."""

    cx: Fraction
    cy: Fraction
    c0: Fraction

    def __call__(self, x, y) -> Fraction:
        return self.cx * x + self.cy * y + self.c0

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.cx + other.cx, self.cy + other.cy, self.c0 + other.c0)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.cx - other.cx, self.cy - other.cy, self.c0 - other.c0)


def form(cx=0, cy=0, c0=0) -> AffineForm:
    return AffineForm(F(cx), F(cy), F(c0))


@dataclass(frozen=True)
class HalfPlane:
    """a1 * x + a2 * y < b (strict) or <= b."""

    a1: Fraction
    a2: Fraction
    b: Fraction
    strict: bool = False

    def __post_init__(self):
        if self.a1 == 0 and self.a2 == 0:
            raise ValueError("degenerate half-plane: (a1, a2) = (0, 0)")

    def slack(self, pt: Point) -> Fraction:
        return self.b - self.a1 * pt[0] - self.a2 * pt[1]

    def contains(self, pt: Point) -> bool:
        s = self.slack(pt)
        return s > 0 if self.strict else s >= 0

    def on_boundary(self, pt: Point) -> bool:
        return self.slack(pt) == 0

    def same_line(self, a1, a2, b) -> bool:
        """True if this plane's boundary is the line a1 x + a2 y = b."""
        a1, a2, b = F(a1), F(a2), F(b)
        return self.a1 * a2 == self.a2 * a1 and self.a1 * b == self.b * a1 and self.a2 * b == self.b * a2


def _constraint(f: AffineForm, strict: bool) -> HalfPlane:
    # f < 0  or  f <= 0
    return HalfPlane(f.cx, f.cy, -f.c0, strict)


def lt(f: AffineForm, g: AffineForm) -> HalfPlane:
    return _constraint(f - g, True)


def le(f: AffineForm, g: AffineForm) -> HalfPlane:
    return _constraint(f - g, False)


def gt(f: AffineForm, g: AffineForm) -> HalfPlane:
    return _constraint(g - f, True)


def ge(f: AffineForm, g: AffineForm) -> HalfPlane:
    return _constraint(g - f, False)


@dataclass(frozen=True)
class Polygon:
    """Closure of a half-plane intersection; vertices counterclockwise."""

    vertices: tuple[Point, ...]
    kind: str  # empty | point | segment | polygon

    @property
    def area(self) -> Fraction:
        v = self.vertices
        if len(v) < 3:
            return F(0)
        s = sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v)))
        return s / 2

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def centroid(self) -> Point:
        v = self.vertices
        return (sum(x for x, _ in v) / len(v), sum(y for _, y in v) / len(v))


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _clip(poly: list[Point], hp: HalfPlane) -> list[Point]:
    out: list[Point] = []
    n = len(poly)
    for i in range(n):
        P, Qp = poly[i], poly[(i + 1) % n]
        sP, sQ = hp.slack(P), hp.slack(Qp)
        if sP >= 0:
            out.append(P)
        if (sP > 0 and sQ < 0) or (sP < 0 and sQ > 0):
            t = sP / (sP - sQ)
            out.append((P[0] + t * (Qp[0] - P[0]), P[1] + t * (Qp[1] - P[1])))
    return out


def _dedupe(pts: list[Point]) -> list[Point]:
    out: list[Point] = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _simplify(pts: list[Point]) -> list[Point]:
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            if _cross(pts[i - 1], pts[i], pts[(i + 1) % len(pts)]) == 0:
                del pts[i]
                changed = True
                break
    return pts


def halfplane_intersect(planes: Sequence[HalfPlane]) -> Polygon:
    """Exact intersection of finitely many half-planes.

    Returns the closure's vertices; ``kind`` distinguishes an empty set from
    degenerate point/segment results.  A lower-dimensional closure counts as
    empty when a strict plane is tight along it.  Unbounded intersections
    raise ValueError.
    """
    poly: list[Point] = [(-_BOX, -_BOX), (_BOX, -_BOX), (_BOX, _BOX), (-_BOX, _BOX)]
    for hp in planes:
        poly = _dedupe(_clip(poly, hp))
        if not poly:
            return Polygon((), "empty")
    if any(abs(c) == _BOX for pt in poly for c in pt):
        raise ValueError("half-plane intersection is unbounded")
    pts = list(dict.fromkeys(poly))
    area2 = sum(_cross(pts[0], pts[i], pts[i + 1]) for i in range(1, len(pts) - 1)) if len(pts) >= 3 else 0
    if area2 == 0:
        # collinear: keep the two extreme points
        ends = sorted(pts)
        pts = [ends[0]] if ends[0] == ends[-1] else [ends[0], ends[-1]]
        probe = pts[0] if len(pts) == 1 else ((pts[0][0] + pts[1][0]) / 2, (pts[0][1] + pts[1][1]) / 2)
        if not all(hp.contains(probe) for hp in planes):
            return Polygon((), "empty")
        return Polygon(tuple(pts), "point" if len(pts) == 1 else "segment")
    return Polygon(tuple(_simplify(_dedupe(poly))), "polygon")


@dataclass
class Cell:
    label: str
    planes: tuple[HalfPlane, ...]
    polygon: Polygon

    @property
    def degenerate(self) -> bool:
        return self.polygon.kind != "polygon"

    def contains(self, pt: Point) -> bool:
        return all(hp.contains(pt) for hp in self.planes)

    def edge_on(self, a1, a2, b) -> bool:
        """True if two consecutive vertices lie on the line a1 x + a2 y = b."""
        v = self.polygon.vertices
        on = [F(a1) * x + F(a2) * y == F(b) for x, y in v]
        return any(on[i] and on[(i + 1) % len(v)] for i in range(len(v))) if len(v) >= 2 else False


@dataclass
class CaseRegion:
    label: str
    axes: tuple[str, str]
    cells: list[Cell] = dc_field(default_factory=list)

    def contains(self, pt) -> bool:
        return point_in_region(pt, self)

    def cell(self, label: str) -> Cell:
        for c in self.cells:
            if c.label == label:
                return c
        raise KeyError(label)


def point_in_region(pt, region: CaseRegion) -> bool:
    pt = (F(pt[0]), F(pt[1]))
    return any(c.contains(pt) for c in region.cells)


def _build(label: str, axes, pieces: Iterable[tuple[str, list[HalfPlane]]]) -> CaseRegion:
    region = CaseRegion(label, axes)
    for name, planes in pieces:
        poly = halfplane_intersect(planes)
        if not poly.is_empty:
            region.cells.append(Cell(name, tuple(planes), poly))
    return region


# ---------------------------------------------------------------------------
# exponent forms

X, Y, ONE = form(1, 0, 0), form(0, 1, 0), form(0, 0, 1)


def _case_bounds(case_id: int) -> tuple[Optional[Fraction], Fraction]:
    return CASE_RANGES[case_id - 1]


def exponent_form(bound_id: str, case_id: Optional[int] = None, nu: Optional[int] = None) -> tuple[AffineForm, ...]:
    """Affine exponent(s) of a catalog bound.

    Coordinates: ``cor22``/``cp11`` use (x, y) = (delta, gamma) with
    d = p^delta, e = p^gamma; ``thm23``/``a65``/``cp11_e1`` use
    (x, y) = (eps, eta) with h = p^eps, n = p^eta; ``thm21`` uses
    (x, y) = (log_p Delta, log_p Gamma) and needs ``nu``.  Two-term bounds
    return one form per term.
    """
    if bound_id == "cor22":
        row = COR22_ROWS[case_id - 1]
        return (form(row["d"], row["e"], row["p"]),)
    if bound_id == "thm23":
        row = THM23_ROWS[case_id - 1]
        return (form(row["h"], row["n"], row["p"]),)
    if bound_id == "thm21":
        if nu is None or nu < 1:
            raise ValueError("thm21 needs nu")
        row = THM21_ROWS[case_id - 1]
        return (form(row["Delta"], F(-1, 4 * nu), row["p"]),)
    if bound_id == "cp11":
        return (X, form(0, CP11_E_EXP, CP11_P_EXP))
    if bound_id == "cp11_e1":
        # e = 1 and d <= p^{89/92}: only the p^{89/92} term matters
        return (form(0, 0, CP11_P_EXP),)
    if bound_id == "a65":
        return (form(0, -1, 1), form(F(1, 2), 0, F(3, 4)))
    if bound_id == "trivial":
        return (ONE,)
    raise ValueError(f"unknown bound id {bound_id!r}")


def _case_planes(key: AffineForm, case_id: int) -> list[HalfPlane]:
    lo, hi = _case_bounds(case_id)
    planes = [lt(key, form(c0=hi))]
    if lo is not None:
        planes.append(ge(key, form(c0=lo)))
    return planes


def _beats(ours: AffineForm, theirs: Sequence[AffineForm], tag: str) -> list[tuple[str, list[HalfPlane]]]:
    """Disjoint branches of ours < max(theirs)."""
    branches = []
    for i, t in enumerate(theirs):
        planes = [lt(ours, t)] + [ge(ours, prev) for prev in theirs[:i]]
        branches.append((f"{tag}{i}", planes))
    return branches


def region_cor22_vs_cp11() -> CaseRegion:
    """(delta, gamma) where the binomial d/e bound is nontrivial and beats CP11."""
    key = X - Y
    domain = [ge(Y, form()), le(Y, X), le(X, ONE), le(X, form(c0=CP11_P_EXP))]
    pieces = []
    for k in range(1, 5):
        (ours,) = exponent_form("cor22", k)
        base = domain + _case_planes(key, k) + [lt(ours, ONE)]
        for tag, extra in _beats(ours, exponent_form("cp11"), "cp11_"):
            pieces.append((f"case{k}/{tag}", base + extra))
    return _build("fig61", ("delta", "gamma"), pieces)


def region_thm23_vs_prior() -> CaseRegion:
    """(eps, eta) where the (h, n) bound is nontrivial and beats both A65 and CP11."""
    domain = [ge(X, form()), ge(Y, form()), le(X, ONE), le(Y, ONE), lt(X + Y, ONE)]
    (cp11,) = exponent_form("cp11_e1")
    pieces = []
    for k in range(1, 5):
        (ours,) = exponent_form("thm23", k)
        base = domain + _case_planes(Y, k) + [lt(ours, ONE), lt(ours, cp11)]
        for tag, extra in _beats(ours, exponent_form("a65"), "a65_"):
            pieces.append((f"case{k}/{tag}", base + extra))
    return _build("fig62", ("eps", "eta"), pieces)


def region_thm21_nontrivial(nu: int, feasible_only: bool = False) -> CaseRegion:
    """(log_p Delta, log_p Gamma) where the Delta/Gamma bound is below p.

    ``feasible_only`` adds Delta * Gamma <= p, which always holds since
    Delta <= d <= D = (p-1)/Gamma.
    """
    if nu < 2:
        raise ValueError("nu >= 2")
    domain = [ge(X, form()), le(X, ONE), ge(Y, form()), le(Y, ONE)]
    if feasible_only:
        domain.append(le(X + Y, ONE))
    pieces = []
    for k in range(1, 5):
        (ours,) = exponent_form("thm21", k, nu)
        pieces.append((f"case{k}", domain + _case_planes(X, k) + [lt(ours, ONE)]))
    return _build(f"thm21_nu{nu}", ("log_Delta", "log_Gamma"), pieces)


# ---------------------------------------------------------------------------
# slicing


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool
    hi_closed: bool


def _slice_cell(planes: Sequence[HalfPlane], axis: str, value: Fraction) -> Optional[Interval]:
    lo, hi = -_BOX, _BOX
    lo_c = hi_c = True
    for hp in planes:
        coef, fixed = (hp.a1, hp.a2) if axis == "y" else (hp.a2, hp.a1)
        rhs = hp.b - fixed * value
        if coef == 0:
            if rhs < 0 or (hp.strict and rhs == 0):
                return None
            continue
        bound = rhs / coef
        if coef > 0:  # t <= bound
            if bound < hi or (bound == hi and hp.strict):
                hi, hi_c = bound, not hp.strict
        else:  # t >= bound
            if bound > lo or (bound == lo and hp.strict):
                lo, lo_c = bound, not hp.strict
    if lo > hi or (lo == hi and not (lo_c and hi_c)):
        return None
    return Interval(lo, hi, lo_c, hi_c)


def slice_region(region: CaseRegion, axis: str, value) -> list[Interval]:
    """Exact 1-D section of the region on the line ``axis = value``.

    The free coordinate's intervals are merged where they touch.
    """
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    value = F(value)
    parts = [iv for c in region.cells if (iv := _slice_cell(c.planes, axis, value)) is not None]
    parts.sort(key=lambda iv: (iv.lo, not iv.lo_closed))
    merged: list[Interval] = []
    for iv in parts:
        if merged:
            last = merged[-1]
            touches = iv.lo < last.hi or (iv.lo == last.hi and (iv.lo_closed or last.hi_closed))
            if touches:
                if iv.hi > last.hi or (iv.hi == last.hi and iv.hi_closed):
                    merged[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                continue
        merged.append(iv)
    return merged


# ---------------------------------------------------------------------------
# emission


def frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


def _dec(q: Fraction) -> str:
    return f"{float(q):.12g}"


def region_rows(region: CaseRegion, decimals: bool = False) -> list[dict]:
    rows = []
    for cid, cell in enumerate(region.cells):
        for vi, (x, y) in enumerate(cell.polygon.vertices):
            row = {
                "cell_id": cid,
                "vertex_index": vi,
                "x_num": x.numerator,
                "x_den": x.denominator,
                "y_num": y.numerator,
                "y_den": y.denominator,
            }
            if decimals:
                row.update(x=_dec(x), y=_dec(y))
            rows.append(row)
    return rows


def region_to_csv(region: CaseRegion, decimals: bool = False) -> str:
    cols = ["cell_id", "vertex_index", "x_num", "x_den", "y_num", "y_den"] + (["x", "y"] if decimals else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(region_rows(region, decimals))
    return buf.getvalue()


def region_to_json(region: CaseRegion, decimals: bool = False) -> str:
    cells = []
    for cid, cell in enumerate(region.cells):
        entry = {
            "cell_id": cid,
            "label": cell.label,
            "kind": cell.polygon.kind,
            "vertices": [[frac_str(x), frac_str(y)] for x, y in cell.polygon.vertices],
        }
        if decimals:
            entry["vertices_decimal"] = [[_dec(x), _dec(y)] for x, y in cell.polygon.vertices]
        cells.append(entry)
    return json.dumps({"region": region.label, "axes": list(region.axes), "cells": cells}, indent=2) + "\n"
